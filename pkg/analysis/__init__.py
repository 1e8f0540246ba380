"""Asymptotic analysis: density evolution, ML bounds and relay-distribution LPs"""
