"""
Conflict Graph Module
"""

from .graph import ConflictGraph, Vertex, build_conflict_graph, closed_out_neighborhood

__all__ = ['ConflictGraph', 'Vertex', 'build_conflict_graph', 'closed_out_neighborhood']
