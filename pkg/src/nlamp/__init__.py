"""Heralded noiseless amplification and attenuation of optical states."""

__version__ = "0.1.0"
