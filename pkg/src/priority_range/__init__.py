"""Linear-space indexes for prioritized orthogonal range reporting on weighted points."""

from .core import (BuildError, FourSidedRange, InvalidWeightError, PriorityRangeError,
                   QueryCounters, ThreeSidedRange, UnsupportedOperation, WeightedPoint,
                   contains, rank_of, rank_threshold)
from .gen import GeneratorSpec, generate
from .maxima import MaximaCatalog
from .oracle import SuffixPstBaseline, oracle_max_rank, oracle_threshold, oracle_topk
from .pheap import BaseTree, PersistentHeap, build_persistent
from .prt import PriorityRangeTree
from .prt4 import FourSidedIndex
from .wbpst import WbPst

__all__ = [
    "BaseTree", "BuildError", "FourSidedIndex", "FourSidedRange", "GeneratorSpec",
    "InvalidWeightError", "MaximaCatalog", "PersistentHeap", "PriorityRangeError",
    "PriorityRangeTree", "QueryCounters", "SuffixPstBaseline", "ThreeSidedRange",
    "UnsupportedOperation", "WbPst", "WeightedPoint", "build_persistent", "contains",
    "generate", "oracle_max_rank", "oracle_threshold", "oracle_topk", "rank_of",
    "rank_threshold",
]
