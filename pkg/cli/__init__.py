"""fdpower command-line interface."""
