"""Knapsack and exponent equations over wreath products G wr Z."""

__version__ = "0.1.0"
