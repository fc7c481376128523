"""
ExperimentInput - fans a battery out into one alert per experiment.

Input payload (alert):
  battery  - harness.Battery
  workers  - optional sampler worker count

Output payloads (alert), one per experiment, in battery order:
  battery, workers, experiment (harness.Experiment), index

A report passes through carrying the last battery, so an empty battery
still produces a summary.  reset passes straight through.
"""
import logging

from mdalab.dag import Node

logger = logging.getLogger(__name__)

class ExperimentInput(Node):
  def __init__(self, **kwargs):
    super().__init__(**kwargs)
    self.count = 0
    self.battery = None

  def alert(self, data):
    b = data.get('battery', None)
    if b is None:
      logger.error('[{}] alert without a battery'.format(self.name))
      return False
    self.battery = b
    logger.info('[{}] battery {} with {} experiments'.format(
                self.name, b.name, len(b.experiments)))
    for i, exp in enumerate(b.experiments):
      payload = { 'battery': b, 'workers': data.get('workers', None),
                  'experiment': exp, 'index': i }
      if 'history' in data:
        payload['history'] = data['history'].copy()
      self.notify('alert', payload)
      self.count += 1
    return False

  def report(self, data):
    if self.battery is not None and 'battery' not in data:
      data['battery'] = self.battery
    return True
