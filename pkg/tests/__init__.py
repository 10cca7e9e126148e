"""
Test suite for the CFMM optimal-trade toolkit.

This package contains tests for:
- Trade function, pool and report models
- Special functions and trade function evaluation
- Solver, optimality verification, no-trade region and grid oracle
- Experiments and the command-line interface
- API endpoints
"""
