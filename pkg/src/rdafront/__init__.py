"""Front-speed toolkit for an inviscid reaction-advection-diffusion system:
phase-plane shooting for the selected wave speed, blow-up chart verification,
and a direct simulation cross-check."""

__version__ = "0.1.0"

from .dynsys import Params, Section, Trajectory, integrate
from .equilibria import equilibria_desing, w_minus, w_plus
from .manifolds import ShootResult, mismatch, shoot_strong_stable, shoot_unstable
from .blowup import verify_transition
from .pde_sim import Grid, measure_speed
from .speed_solver import front_profile, solve_speed, sweep

__all__ = [
    "Params",
    "Section",
    "Trajectory",
    "integrate",
    "equilibria_desing",
    "w_minus",
    "w_plus",
    "ShootResult",
    "mismatch",
    "shoot_strong_stable",
    "shoot_unstable",
    "verify_transition",
    "Grid",
    "measure_speed",
    "front_profile",
    "solve_speed",
    "sweep",
    "__version__",
]
