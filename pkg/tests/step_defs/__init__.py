"""
BDD step definitions for pytest-bdd.

This package contains step definitions that map Gherkin scenarios to Python code.
"""
