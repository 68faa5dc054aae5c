"""
Core numerics for marginal-pgm: factors, junction trees, estimation,
inference and privacy mechanisms.
"""
