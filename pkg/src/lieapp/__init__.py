"""Lie sphere geometry of linear Weingarten and Lie applicable surfaces, numerically."""
__version__ = "0.1.0"
