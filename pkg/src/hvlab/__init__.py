"""Hermitian varieties over F_{q^2}: exact counts, classification, audits."""

__version__ = "0.1.0"
