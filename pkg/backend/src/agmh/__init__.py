# Package marker for agmh

__version__ = "0.1.0"
