"""Exact arithmetic toolkit for checking rational-blowdown constructions of
exotic smooth structures on CP^2 # 7(-CP^2)."""

__version__ = "0.1.0"
