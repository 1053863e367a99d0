"""
Utility modules for rheobrown.
"""

from rheobrown.utils import output, validators

__all__ = [
    "output",
    "validators",
]
