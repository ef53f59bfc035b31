"""Command line for strobe."""
