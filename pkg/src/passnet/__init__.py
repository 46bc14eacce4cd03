"""Passing-network HMM: per-game estimation of passing, scoring and organizer parameters."""

from .hmm import ZeroProbabilityError, backward, forward, posteriors
from .model import Alphabet, GameSequence, HmmParams, Player, Roster, renormalize_rows, validate_params
from .network import PassCountMatrix, PassingNetwork, build_network, classify_band
from .training import TrainConfig, TrainReport, init_params, q_function, reestimate, train

__all__ = [
    "Alphabet", "GameSequence", "HmmParams", "PassCountMatrix", "PassingNetwork", "Player",
    "Roster", "TrainConfig", "TrainReport", "ZeroProbabilityError", "backward",
    "build_network", "classify_band", "forward", "init_params", "posteriors", "q_function",
    "reestimate", "renormalize_rows", "train", "validate_params",
]
