"""Hyper-chaotic 4-D flow, ECC key transport and a confusion/diffusion image cipher."""

__version__ = "0.1.0"
