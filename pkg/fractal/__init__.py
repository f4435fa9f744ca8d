"""Mesures de frame et mesures de Bessel pour les mesures auto-affines."""
from fractal.config import VERSION as __version__
