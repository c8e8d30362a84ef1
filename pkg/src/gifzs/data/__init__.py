"""Shipped example system descriptions."""
