"""Numerical construction and audit of a quasiregular map with superattracting
period-2 critical cycles and an escaping half-plane skeleton."""

__version__ = "0.1.0"

from .errors import (BakerLabError, CapExceeded, EpsSearchExhausted, InvalidParameter, ModelFileError,
                     NearPole, RadiusCollapse)
from .geometry import ModelParams, RoundAnnulus, choose_mu, default_base_disc, teichmuller_modulus_bound, u0_contains
from .local_model import LocalModelSpec, critical_data, g_eval, phi_eval, select_epsilon
from .tower import LevelData, Model, Mutation, build_level, region_of
from .dynamics import OrbitRecord, check_forward_images, eval_F, iterate, verify_superattracting

__all__ = [
    "BakerLabError", "CapExceeded", "EpsSearchExhausted", "InvalidParameter", "ModelFileError", "NearPole",
    "RadiusCollapse", "ModelParams", "RoundAnnulus", "choose_mu", "default_base_disc",
    "teichmuller_modulus_bound", "u0_contains", "LocalModelSpec", "critical_data", "g_eval", "phi_eval",
    "select_epsilon", "LevelData", "Model", "Mutation", "build_level", "region_of", "OrbitRecord",
    "check_forward_images", "eval_F", "iterate", "verify_superattracting",
]
