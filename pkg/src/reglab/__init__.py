"""Regularity of graded Tor and Ext modules over complete intersections."""

__version__ = "0.1.0"
