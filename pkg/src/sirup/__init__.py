"""Answering, classification, rewriting and hardness gadgets for covering-axiom sirups."""

__version__ = "0.1.0"
