"""Prompt-based grammatical error correction harness for Indic languages."""

__version__ = "0.1.0"
