"""
CsvTable - one CSV file per experiment, written on report.

Columns: q, phi_q, psi_q, measure, provenance, ci_low, ci_high.
Floats carry 12 significant digits; CI fields are empty for rows that
are not Monte Carlo.  No timestamps, so files are byte-stable.

Configuration:
  out_dir  - output directory (default 'output')
  filename - pattern with {0} battery name, {1} experiment name
             (default '{0}__{1}.csv')
  in_field - field holding the result list (default 'results')
"""
import os
import csv
import logging

from mdalab.dag import Node

logger = logging.getLogger(__name__)

COLUMNS = ('q', 'phi_q', 'psi_q', 'measure', 'provenance', 'ci_low', 'ci_high')

def fmt(v):
  if v is None:
    return ''
  if isinstance(v, float):
    return '{:.12g}'.format(v)
  return str(v)

def write_rows(path, rows):
  with open(path, 'w', newline='') as f:
    w = csv.writer(f, lineterminator='\n')
    w.writerow(COLUMNS)
    for r in rows:
      w.writerow([ fmt(r[c]) for c in COLUMNS ])

class CsvTable(Node):
  def __init__(self, **kwargs):
    self.out_dir = kwargs.pop('out_dir', 'output')
    self.filename = kwargs.pop('filename', '{0}__{1}.csv')
    self.in_field = kwargs.pop('in_field', 'results')
    super().__init__(**kwargs)
    self.written = []

  def report(self, data):
    b = data.get('battery', None)
    bname = b.name if b is not None else 'battery'
    os.makedirs(self.out_dir, exist_ok=True)
    for res in data.get(self.in_field, []):
      path = os.path.join(self.out_dir, self.filename.format(bname, res['name']))
      write_rows(path, res['rows'])
      self.written.append(path)
      logger.info('[{}] wrote {}'.format(self.name, path))
    return True
