"""
Unit Tests for individual modules
"""
