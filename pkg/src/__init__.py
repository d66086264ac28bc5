"""hydrospec - multiprecision QZ eigenvalues for Chebyshev tau Orr-Sommerfeld problems."""

__version__ = "0.1.0"
