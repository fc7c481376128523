"""
Run settings backed by environment variables.

  MDALAB_WORKERS          default worker count for the sampler (1)
  MDALAB_PHI_LIMIT        totient sieve limit Q_max (1000000)
  MDALAB_INTERVAL_BUDGET  max intervals in a 1-D sweep (5000000)
  MDALAB_ENUM_BUDGET      max integer vectors in linear-forms counting (10000000)
  MDALAB_CHUNK            samples per sampler chunk (4096); never changes results

Command-line flags override these (see dag/app.py).
"""
import os
import logging

from mdalab.errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
GENERATOR_ID = 'philox4x64-10'
THRESHOLD_HI = 0.95
THRESHOLD_LO = 0.05
CONVOLUTION_TOL = 1e-9
MERGE_EPS = 1e-15

def _env_int(name, default):
  v = os.environ.get(name)
  if v is None or v.strip() == '':
    return default
  try:
    n = int(v)
  except ValueError:
    raise ConfigError('expected an integer, got {!r}'.format(v), field=name)
  if n < 1:
    raise ConfigError('must be positive, got {}'.format(n), field=name)
  return n

class Settings:
  def __init__(self, **kwargs):
    self.workers = kwargs.pop('workers', None) or _env_int('MDALAB_WORKERS', 1)
    self.phi_limit = kwargs.pop('phi_limit', None) or _env_int('MDALAB_PHI_LIMIT', 10**6)
    self.interval_budget = kwargs.pop('interval_budget', None) or \
                           _env_int('MDALAB_INTERVAL_BUDGET', 5 * 10**6)
    self.enum_budget = kwargs.pop('enum_budget', None) or \
                       _env_int('MDALAB_ENUM_BUDGET', 10**7)
    self.chunk = kwargs.pop('chunk', None) or _env_int('MDALAB_CHUNK', 4096)
    if kwargs:
      raise ConfigError('unknown settings {}'.format(sorted(kwargs)))

  def __repr__(self):
    return 'Settings(workers={}, phi_limit={}, interval_budget={}, ' \
           'enum_budget={}, chunk={})'.format(self.workers, self.phi_limit,
           self.interval_budget, self.enum_budget, self.chunk)

_settings = None

def settings():
  """
  Process-wide settings, read from the environment on first use.
  """
  global _settings
  if _settings is None:
    _settings = Settings()
    logger.debug('settings: {}'.format(_settings))
  return _settings

def override(**kwargs):
  """
  Replace selected settings (flags override environment).
  Returns the new Settings object.
  """
  global _settings
  cur = settings()
  merged = {
    'workers': cur.workers, 'phi_limit': cur.phi_limit,
    'interval_budget': cur.interval_budget, 'enum_budget': cur.enum_budget,
    'chunk': cur.chunk,
  }
  merged.update({ k: v for k, v in kwargs.items() if v is not None })
  _settings = Settings(**merged)
  return _settings
