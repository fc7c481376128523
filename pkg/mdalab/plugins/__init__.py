from .ExperimentInput import ExperimentInput
from .ExperimentRunner import ExperimentRunner
from .DichotomyScan import DichotomyScan
from .BCEvidence import BCEvidence
from .PadicScan import PadicScan
from .Accumulator import Accumulator
