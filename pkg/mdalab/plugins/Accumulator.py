"""
Accumulator - collects one field from every alert.

Alerts are consumed.  A report is forwarded once every watched node has
sent one, with the collected list in out_field and the battery from the
last alert.  revoke/reset clear the list.

Configuration:
  in_field  - payload field to collect (default 'result')
  out_field - field for the list on report (default 'results')
"""
import logging

from mdalab.dag import Node

logger = logging.getLogger(__name__)

class Accumulator(Node):
  def __init__(self, **kwargs):
    self.in_field = kwargs.pop('in_field', 'result')
    self.out_field = kwargs.pop('out_field', 'results')
    super().__init__(**kwargs)
    self.series = []
    self.battery = None
    self.reported = set()

  def alert(self, data):
    if self.in_field not in data:
      logger.error('[{}] alert without {}'.format(self.name, self.in_field))
      return False
    self.series.append(data[self.in_field])
    self.battery = data.get('battery', self.battery)
    return False

  def report(self, data):
    self.reported.add(self.last_source)
    if len(self.reported) < len(self.watch_list):
      return False
    self.reported = set()
    data[self.out_field] = list(self.series)
    if self.battery is not None:
      data['battery'] = self.battery
    logger.debug('[{}] reporting {} entries'.format(self.name, len(self.series)))
    return True

  def revoke(self, data):
    self.series = []
    return True

  def reset(self, data):
    self.series = []
    self.reported = set()
    return True
