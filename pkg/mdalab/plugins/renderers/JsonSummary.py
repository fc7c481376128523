"""
JsonSummary - battery summary document, written on report.

The document echoes the battery configuration (parseable again as a
battery), its hash, seed and generator id, every experiment's rows and
extras, the anomaly list and a disclaimer line.

Configuration:
  out_dir  - output directory (default 'output')
  filename - pattern with {0} battery name (default '{0}.json')
  in_field - field holding the result list (default 'results')
"""
import os
import json
import logging

from mdalab import harness
from mdalab.dag import Node

logger = logging.getLogger(__name__)

def dumps(doc):
  return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + '\n'

class JsonSummary(Node):
  def __init__(self, **kwargs):
    self.out_dir = kwargs.pop('out_dir', 'output')
    self.filename = kwargs.pop('filename', '{0}.json')
    self.in_field = kwargs.pop('in_field', 'results')
    super().__init__(**kwargs)
    self.summary = None

  def report(self, data):
    b = data.get('battery', None)
    if b is None:
      logger.error('[{}] report without a battery'.format(self.name))
      return False
    self.summary = harness.summary(b, data.get(self.in_field, []))
    os.makedirs(self.out_dir, exist_ok=True)
    path = os.path.join(self.out_dir, self.filename.format(b.name))
    with open(path, 'w') as f:
      f.write(dumps(self.summary))
    logger.info('[{}] wrote {} ({} anomalies)'.format(self.name, path,
                len(self.summary['anomalies'])))
    data['summary'] = self.summary
    return True
