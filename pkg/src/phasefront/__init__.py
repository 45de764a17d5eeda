"""Exact Riemann solver and wave-front tracking simulator for an
isothermal two-phase flow model with pressure p = a^2(lambda)/v."""

from .model import PressureModel, State, WaveStrengths, h
from .riemann import RiemannFan, solve, split_rarefaction, wave_speed

__all__ = [
    "PressureModel",
    "State",
    "WaveStrengths",
    "h",
    "RiemannFan",
    "solve",
    "split_rarefaction",
    "wave_speed",
]

__version__ = "0.1.0"
