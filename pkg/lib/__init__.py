"""Shared helpers for the Carleson toolkit."""
