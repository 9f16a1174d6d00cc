"""Interference analysis for inter-satellite links with cone antennas on circular orbits."""

__version__ = "0.1.0"
