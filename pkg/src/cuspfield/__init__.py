"""Hyperbolic structures and invariant trace fields of alternating links.

Crossing and edge labels of a link diagram are solved numerically, the
geometric solution is selected, and its labels are recognised as elements
of a single number field.
"""

__version__ = "0.1.0"
