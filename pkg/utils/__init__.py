"""Utility modules"""

