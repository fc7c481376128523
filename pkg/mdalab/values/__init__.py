from .History import History
from .HitCounter import HitCounter
from .MeasureEstimate import MeasureEstimate
from .IntervalUnion import IntervalUnion
from .PiecewiseCdf import PiecewiseCdf
from .DiscreteSpace import DiscreteSpace, ProductSet, Triviality
