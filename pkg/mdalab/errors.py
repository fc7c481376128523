"""
Exceptions raised by the mdalab kernel.

Library code raises these; DAG nodes catch MdalabError, log it with the
node name, and record an anomaly instead of letting it escape.
"""

class MdalabError(Exception):
  pass

class DomainError(MdalabError, ValueError):
  """
  Argument outside the mathematical domain of an operation
  (q = 0, non-prime p, bad dimension, invalid family parameters).
  """
  pass

class OverflowSumError(MdalabError, ArithmeticError):
  """
  A partial sum met a +inf summand (conditional families under a/0).
  """
  def __init__(self, q, message=None):
    self.q = q
    super().__init__(message or 'infinite summand at q={}'.format(q))

class UndefinedRatioError(MdalabError, ZeroDivisionError):
  pass

class ConvergenceError(MdalabError):
  """
  Numeric integration did not reach its tolerance.
  low/high bracket the true value as far as the integrator could tell.
  """
  def __init__(self, message, low, high):
    self.low = low
    self.high = high
    super().__init__('{} (bracket [{:.12g}, {:.12g}])'.format(message, low, high))

class ResourceError(MdalabError):
  def __init__(self, what, needed, budget):
    self.what = what
    self.needed = needed
    self.budget = budget
    super().__init__('{}: {} needed, budget {}'.format(what, needed, budget))

class ValidationError(MdalabError, ValueError):
  pass

class ConfigError(MdalabError):
  """
  Malformed configuration. field is a dotted path such as
  'experiments[2].family.name'; line/column come from the JSON decoder.
  """
  def __init__(self, message, field=None, line=None, column=None):
    self.field = field
    self.line = line
    self.column = column
    where = []
    if line is not None:
      where.append('line {}'.format(line))
      if column is not None:
        where.append('column {}'.format(column))
    if field:
      where.append('field {}'.format(field))
    prefix = ', '.join(where)
    super().__init__('{}: {}'.format(prefix, message) if prefix else message)
