"""
dialoglens: coded meeting transcript analysis
"""
__version__ = "1.0.0"
