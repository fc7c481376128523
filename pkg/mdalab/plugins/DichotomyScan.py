"""
DichotomyScan - tail-union estimates and full/null classification.
"""
from mdalab.plugins.ExperimentRunner import ExperimentRunner

class DichotomyScan(ExperimentRunner):
  def __init__(self, **kwargs):
    super().__init__('dichotomy', **kwargs)
