"""Verification toolkit for lattices in products of trees and Davis complexes of Odd graphs."""

__version__ = "0.1.0"
