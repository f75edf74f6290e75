"""Sticky orbits and survival probabilities in open mushroom billiards."""
from .errors import *  # noqa: F401,F403
from .contfrac import ContinuedFraction, QuadraticSurd, expand, parse_number, convergents
from .geometry import MushroomSpec, Stem, HoleSpec, build_boundary
from .mupo import Mupo, enumerate_mupos, classify
from .hat import SurvivalPrediction, hat_C, hat_prediction, island_measure, escape_rate, mean_free_path
from .stem import StemCase, stem_C, direct_regular_C, core_constant, stem_prediction
from .montecarlo import survival_curve, survivor_phase_map, plateau_estimate
from .config import load_spec

__version__ = "0.1.0"
