"""Exact Noether-Lefschetz / Gromov-Witten pipeline for K3^[2]-type pencils."""

__version__ = "0.1.0"
