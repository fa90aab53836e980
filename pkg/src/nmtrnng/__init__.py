"""Joint neural machine translation and transition-based dependency parsing."""

__version__ = "1.0.0"
