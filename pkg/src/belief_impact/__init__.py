"""Bayesian belief impact, optimal report design and authenticity-filter tuning."""

__version__ = "0.1.0"
