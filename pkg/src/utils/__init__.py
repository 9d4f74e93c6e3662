"""
Shared utilities: logging and seed derivation
"""
