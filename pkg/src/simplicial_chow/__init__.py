"""Integral Chow rings of genus-0 simplicially stable moduli spaces."""
