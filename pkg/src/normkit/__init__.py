"""normkit: numerical toolkit for norm-maintaining function spaces."""

__version__ = "0.1.0"
