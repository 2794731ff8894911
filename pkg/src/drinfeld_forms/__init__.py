"""Drinfeld modular forms in a truncated Puiseux-series model."""
