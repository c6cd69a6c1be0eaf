"""Local samplers, symmetric distributions and the inequalities behind them."""

__version__ = "0.1.0"
