"""Effective capacity of renewal reward processes and HARQ schemes"""

__version__ = "1.0.0"
