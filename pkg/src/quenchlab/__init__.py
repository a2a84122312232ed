"""Simulated quenching parameter laboratory."""
