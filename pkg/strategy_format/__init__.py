"""Parsing and validity checking of structured guide output."""
