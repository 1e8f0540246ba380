"""Buffer-based distributed LT codes: simulation, density evolution and relay design"""

__version__ = "0.1.0"
