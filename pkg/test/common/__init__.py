"""
Package placeholder.
"""
