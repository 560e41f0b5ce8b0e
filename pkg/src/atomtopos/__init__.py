"""Atomic objects and amazing right adjoints in finite presheaf toposes."""

__version__ = "0.1.0"
