"""Secrecy rates and capacities of state-dependent wiretap channels."""

__version__ = "0.1.0"
