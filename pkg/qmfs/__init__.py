# Quaternionic method of fundamental solutions for time-harmonic Maxwell problems
__version__ = "1.0.0"
