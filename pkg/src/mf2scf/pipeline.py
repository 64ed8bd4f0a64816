"""Per-image feature extraction: composes the raster, graph, texture, and
color stages into the f2/f3 pair every downstream consumer uses."""

from dataclasses import dataclass

import numpy as np

from .cngraph import (
    build_graph,
    clustering_map,
    degree_energy_map,
    eigen_entropy_map,
    quantize_feature_map,
)
from .colorfeat import color_feature, hsv_histograms
from .imgproc import rgb_to_hsv, sobel_gradient, to_grayscale
from .texture import global_feature


@dataclass
class ImageFeatures:
    f2: np.ndarray
    f3: np.ndarray


def extract_image_features(rgb, params, planes_out=None):
    """Compute f2 (295) and f3 (768) for one RGB image.

    When planes_out is a dict it receives the five uint8 planes fed to the
    texture stage (keys: gsi, goi, cc, dc, ec) for debug export.
    """
    gsi = to_grayscale(rgb)
    goi = sobel_gradient(gsi)
    graph = build_graph(gsi, goi, params)
    cc = quantize_feature_map(clustering_map(graph))
    dc = quantize_feature_map(degree_energy_map(graph))
    ec = quantize_feature_map(eigen_entropy_map(graph))
    f2 = global_feature(gsi, goi, cc, dc, ec)
    f3 = color_feature(hsv_histograms(rgb_to_hsv(rgb)))
    if planes_out is not None:
        planes_out.update({"gsi": gsi, "goi": goi, "cc": cc, "dc": dc, "ec": ec})
    return ImageFeatures(f2=f2, f3=f3)
