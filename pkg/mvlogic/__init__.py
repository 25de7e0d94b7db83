"""
MV-Logic Network Translator
Conversion between ReLU networks on the unit cube and Lukasiewicz-logic terms
"""

__version__ = '1.0.0'
