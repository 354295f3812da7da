"""Compressed full-text indexes and binary relations with dynamic updates."""
from ._jit import USE_NUMBA
from .amortized import AmortizedDynamicIndex
from .binrel import DirectedGraph, DynamicRelation, RelationBlock
from .bits import CompactReportBitVector, PlainBitVector, RankBitVector, ReportBitVector
from .semi_dynamic import SemiDynamicIndex
from .static_index import StaticIndex
from .suffix_tree import GeneralizedSuffixTree
from .worstcase import WorstCaseDynamicIndex

__all__ = [
    "USE_NUMBA", "AmortizedDynamicIndex", "WorstCaseDynamicIndex", "StaticIndex",
    "SemiDynamicIndex", "GeneralizedSuffixTree", "DynamicRelation", "DirectedGraph",
    "RelationBlock", "CompactReportBitVector", "ReportBitVector", "RankBitVector",
    "PlainBitVector",
]
