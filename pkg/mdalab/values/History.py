"""
History - lineage of the nodes a payload passed through.

Entries are node names, or tuples of lineages where a node merged
several inputs.  emit() gives a hashable, JSON-friendly form.
"""

class History:
  def __init__(self, val=()):
    self.val = list(val)

  def copy(self):
    return History(self.val)

  def clear(self):
    self.val = []

  def append(self, item):
    self.val.append(item)

  def combine(self, hists):
    """
    Replace the lineage with one merged entry built from several inputs.
    """
    self.val = [ tuple(h.emit() for h in hists) ]

  def emit(self):
    return tuple(tuple(v) if isinstance(v, list) else v for v in self.val)

  def last(self):
    return self.val[-1] if self.val else None

  def names(self):
    """
    Flat list of node names, depth first.
    """
    out = []
    def walk(v):
      if isinstance(v, (list, tuple)):
        for x in v:
          walk(x)
      else:
        out.append(v)
    walk(self.val)
    return out

  def __len__(self):
    return len(self.val)

  def __str__(self):
    return str(self.emit())
