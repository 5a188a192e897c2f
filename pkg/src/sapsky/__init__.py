"""Self-adaptive probabilistic skyline processing over uncertain edge streams."""

__version__ = "0.1.0"
