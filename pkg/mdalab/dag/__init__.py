from .Node import Node
