"""Configuration: constants, environment settings and experiment files"""
