"""
Model tests.

Tests for trade function, market, report and experiment models.
"""
