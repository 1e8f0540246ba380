"""Distributed LT coding components"""
