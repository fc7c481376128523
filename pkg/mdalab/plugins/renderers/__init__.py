from .CsvTable import CsvTable
from .JsonSummary import JsonSummary
