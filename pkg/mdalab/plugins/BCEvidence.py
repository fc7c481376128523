"""
BCEvidence - Borel-Cantelli bound curve, union curve and slice-measure table.
"""
from mdalab.plugins.ExperimentRunner import ExperimentRunner

class BCEvidence(ExperimentRunner):
  def __init__(self, **kwargs):
    super().__init__('bc_evidence', **kwargs)
