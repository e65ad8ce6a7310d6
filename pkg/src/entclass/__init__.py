"""Tangle-based entanglement classification for 2-4 qubit density matrices."""

from .classify import ClassLabel, Kind, class_labels, class_names, label
from .dataset import Dataset, generate, read_dataset, split, write_dataset
from .measures import Bipartition, TangleVector, tangle_vector
from .mlp import MlpModel, load_model, predict, save_model, train
from .states import DensityMatrix, validate

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "ClassLabel",
    "Dataset",
    "DensityMatrix",
    "Kind",
    "MlpModel",
    "TangleVector",
    "class_labels",
    "class_names",
    "generate",
    "label",
    "load_model",
    "predict",
    "read_dataset",
    "save_model",
    "split",
    "tangle_vector",
    "train",
    "validate",
    "write_dataset",
]
