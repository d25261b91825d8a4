"""Bundled example datasets (currently the 150-row iris table)."""
