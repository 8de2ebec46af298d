"""Interpretability toolkit for molecular generative-model embeddings."""

__version__ = "0.1.0"
