"""Figures from henon CLI artifacts; no numerics are recomputed here."""

from .io import MissingColumnsError, SchemaMismatchError, read_document, read_table
from .render import KINDS, PALETTE, FigureSpec, render

__version__ = "0.1.0"
