"""Integration tests for VB_Converter API."""
