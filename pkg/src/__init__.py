"""
Coded Caching Toolkit - Main Package
"""

__version__ = "0.1.0"
