"""Adaptive clinical decision support toolkit.

Trains and cross-validates classifiers that predict above- vs
below-average outcome improvement from intake data, and ranks
pre-set service packages for individual clients ("what if"
analysis).
"""

__version__ = "0.1.0"
