"""Scene classification from fused pixel-graph texture, uniform LBP, and HSV
color features, with linear one-vs-rest SVM classification and optional
PCA/LDA reduction."""

from .cngraph import CnParams, PixelGraph, build_graph
from .fusion import FeatureLayout, SplitSpec, fuse, micro_accuracy, split
from .pipeline import extract_image_features
from .svm import Model, predict, svm_train

__version__ = "0.1.0"

__all__ = [
    "CnParams",
    "PixelGraph",
    "build_graph",
    "FeatureLayout",
    "SplitSpec",
    "fuse",
    "micro_accuracy",
    "split",
    "extract_image_features",
    "Model",
    "predict",
    "svm_train",
    "__version__",
]
