"""
PadicScan - weighted solution counts for sampled points.
"""
from mdalab.plugins.ExperimentRunner import ExperimentRunner

class PadicScan(ExperimentRunner):
  def __init__(self, **kwargs):
    super().__init__('padic', **kwargs)
