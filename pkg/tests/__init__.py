"""
Test suite for dialoglens
"""
