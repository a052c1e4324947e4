"""Satisfiability toolkit for monotone hybrid logic over the naturals and
over linear orders."""

from .formula import Formula, parse, to_text, analyze
from .deciders import Verdict, decide, route

__all__ = ["Formula", "parse", "to_text", "analyze", "Verdict", "decide", "route"]
__version__ = "0.1.0"
