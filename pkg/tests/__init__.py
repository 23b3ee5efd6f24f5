"""Test suite for ghelab."""
