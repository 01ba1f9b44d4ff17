"""Structured sequence learners: L-BFGS CRF, passive-aggressive, averaged perceptron."""
from .crf import crf_objective_and_gradient, train_crf_lbfgs
from .inference import forward_backward, score_sequence, viterbi
from .lattice import LatticeScores
from .model import (LEARNERS, LearnerConfig, ModelFormatError, SequenceModel, format_top_features,
                    inspect_top_features, load_model, save_model)
from .online import train_pa, train_perceptron

TRAINERS = {
    "crf-lbfgs": train_crf_lbfgs,
    "crf-pa": train_pa,
    "perceptron": train_perceptron,
}


def train(instances, scheme, learner="crf-lbfgs", config=None):
    """Train the named learner on (vectors, labels) instances."""
    if learner not in TRAINERS:
        raise ValueError("unknown learner {!r}; choose from {}".format(learner, ", ".join(LEARNERS)))
    return TRAINERS[learner](instances, scheme, config or LearnerConfig())


__all__ = [
    "LEARNERS", "LatticeScores", "LearnerConfig", "ModelFormatError", "SequenceModel",
    "TRAINERS", "crf_objective_and_gradient", "format_top_features", "forward_backward",
    "inspect_top_features", "load_model", "save_model", "score_sequence", "train",
    "train_crf_lbfgs", "train_pa", "train_perceptron", "viterbi",
]
