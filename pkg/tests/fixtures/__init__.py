"""
Test fixtures for the CFMM toolkit.

Provides the six-asset reference pool, small random pools and persisted
convexity witnesses.
"""
