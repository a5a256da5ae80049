"""
Testing package for the cross-market fusion forecaster
"""
