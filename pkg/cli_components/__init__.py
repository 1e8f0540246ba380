"""CLI components"""

