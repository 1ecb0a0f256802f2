"""Levi-Civita correspondence between 2D Coulomb and 2D oscillator spectra
in Schroedinger, Klein-Gordon and Dirac quantum mechanics."""

__version__ = "0.1.0"
