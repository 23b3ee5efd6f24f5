"""ghelab - numerical laboratory for generalized hydrodynamics and its Navier-Stokes-Fourier limit."""

__version__ = "1.0.0"
__author__ = "ghelab Contributors"
