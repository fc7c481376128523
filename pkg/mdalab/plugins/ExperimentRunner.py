"""
ExperimentRunner - runs the experiments of one kind.

Alerts carrying an experiment of another kind are consumed.  The result
dictionary goes downstream in the 'result' field.  Library errors turn
into anomalies on the result (see harness.run_experiment), so one bad
experiment does not stop the battery.

Configuration:
  kind - dichotomy, bc_evidence or padic
"""
import logging

from mdalab import harness
from mdalab.dag import Node

logger = logging.getLogger(__name__)

class ExperimentRunner(Node):
  def __init__(self, kind, **kwargs):
    if kind not in harness.KINDS:
      raise ValueError('unknown experiment kind {!r}'.format(kind))
    self.kind = kind
    super().__init__(**kwargs)

  def alert(self, data):
    exp = data.get('experiment', None)
    if exp is None or exp.kind != self.kind:
      return False
    logger.info('[{}] running {}'.format(self.name, exp.name))
    res = harness.run_experiment(exp, data['battery'], data.get('workers', None))
    for a in res['anomalies']:
      logger.warning('[{}] {}: {}'.format(self.name, exp.name, a))
    data['result'] = res
    return True
