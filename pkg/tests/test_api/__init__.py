"""
API endpoint tests.

Tests for all FastAPI endpoints.
"""
