"""
dunklsb: numerical verification of Dunkl Segal-Bargmann transforms and the
restriction principle for the reflection group Z_2^N.
"""

__version__ = "0.1.0"
