"""Service modules"""

