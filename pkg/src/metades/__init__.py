"""Dynamic ensemble selection via meta-learned competence estimation.

The package trains a bagged pool of weak linear classifiers, learns a
Gaussian naive Bayes meta-classifier that maps local behaviour descriptors
to a per-classifier competence estimate, and classifies queries with the
dynamically selected (or weighted) sub-ensemble. Static fusion rules,
local-accuracy selectors and boosting are included as baselines, along
with synthetic benchmark problems and a CLI for experiments.
"""

from .core import classify_batch, evaluate, train_system
from .datagen import Dataset, GenSpec, generate
from .experiment import ExperimentConfig, run_eval, run_sweep, run_train
from .kernels import BACKEND
from .persist import load_system, save_system

__all__ = [
    "BACKEND",
    "Dataset",
    "ExperimentConfig",
    "GenSpec",
    "classify_batch",
    "evaluate",
    "generate",
    "load_system",
    "run_eval",
    "run_sweep",
    "run_train",
    "save_system",
    "train_system",
]
__version__ = "0.1.0"
