"""Test suite for the PSI kernel."""
