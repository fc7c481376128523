"""
Node in the experiment DAG (observer/observable).

A payload is a dict with an 'action' entry: alert, revoke, report or
reset.  update() dispatches it to the method of the same name on a
shallow copy; the return value decides what goes downstream:
  True       forward the (possibly modified) copy
  False/None consume
  dict       forward this payload instead (its 'action' may differ)
notify() appends the node name to the payload's History.

Plugins subclass Node and override the action methods.
"""
import logging

from mdalab.values import History

logger = logging.getLogger(__name__)

ACTIONS = ('alert', 'revoke', 'report', 'reset')

class Node:

  def __init__(self, name, **kwargs):
    if kwargs:
      raise TypeError('[{}] unexpected arguments {}'.format(name, sorted(kwargs)))
    self.name = name
    self.observers = []   # downstream nodes
    self.watch_list = []  # upstream nodes
    self.last_data = {}
    self.last_source = None

  def dispose(self):
    self.last_data.clear()
    for n in list(self.observers):
      self.detach(n)
    for n in list(self.watch_list):
      n.detach(self)

  def attach(self, observer):
    if observer not in self.observers:
      self.observers.append(observer)
      observer.watch_list.append(self)

  def detach(self, observer):
    if observer in self.observers:
      self.observers.remove(observer)
      observer.watch_list.remove(self)

  def notify(self, action, data):
    """
    Send a payload to every observer, recording this node in its history.
    """
    self.last_data = data.copy()
    self.last_data['action'] = action
    if 'history' not in self.last_data:
      self.last_data['history'] = History()
    self.last_data['history'].append(self.name)
    for obs in self.observers:
      logger.debug('[{}] {} -> {}'.format(self.name, action, obs.name))
      obs.update(self.last_data)

  def alert(self, data):
    return True

  def revoke(self, data):
    return True

  def report(self, data):
    return True

  def reset(self, data):
    return True

  def other(self, data):
    logger.error('[{}] unrecognized action {}'.format(self.name, data['action']))
    return False

  def update(self, data):
    if 'action' not in data:
      logger.error('[{}] action not specified'.format(self.name))
      return
    cdata = data.copy()
    if 'history' in cdata:
      cdata['history'] = data['history'].copy()
      self.last_source = cdata['history'].last()
    action = cdata['action']
    handler = getattr(self, action) if action in ACTIONS else self.other
    v = handler(cdata)
    if v is True:
      self.notify(action, cdata)
    elif isinstance(v, dict):
      self.notify(v.get('action', action), v)
    elif v not in (False, None):
      logger.error('[{}] bad action response {!r}'.format(self.name, v))

  def watch_index(self, source):
    """
    Index of the named upstream node in watch_list, -1 if unknown.
    """
    for i, n in enumerate(self.watch_list):
      if n.name == source:
        return i
    logger.error('[{}] unrecognized source {}'.format(self.name, source))
    return -1

  def last_watch_index(self):
    if self.last_source:
      return self.watch_index(self.last_source)
    logger.error('[{}] no payload source'.format(self.name))
    return -1
