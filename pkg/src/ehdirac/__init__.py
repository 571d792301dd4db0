"""Verification engine for twisted spin-c Dirac operators on Eguchi-Hanson and Calabi spaces."""

__version__ = "0.1.0"
