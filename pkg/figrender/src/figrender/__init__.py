"""Figure renderer for polarization-experiment CSVs."""

from .io import SchemaError, read_columns
from .plots import KINDS, Style, render, tukey_box_stats

__version__ = "0.1.0"
