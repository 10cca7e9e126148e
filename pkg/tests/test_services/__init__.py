"""
Service layer tests.

Tests for special functions, trade functions, the solver, verification and experiments.
"""
