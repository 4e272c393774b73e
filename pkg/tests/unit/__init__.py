"""Unit tests for gog-hhg."""
