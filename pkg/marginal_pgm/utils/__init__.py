"""
Configuration, dataset loading and output helpers for marginal-pgm.
"""
