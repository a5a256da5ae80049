"""
Logic Tests across modules
"""
