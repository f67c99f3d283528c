"""Packaged catalog of surfaces with automorphisms."""
