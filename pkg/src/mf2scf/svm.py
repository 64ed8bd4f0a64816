"""One-vs-rest linear SVM with a monotone batch subgradient optimizer, plus
the versioned flat-text model format.

Training minimizes J(W, b) = 0.5 * sum_c ||w_c||^2 + C * sum_{i,c} hinge_ic
over all classes jointly, where hinge_ic = max(0, 1 - y_ic (w_c . x_i + b_c))
and y_ic is +1 for the record's own class, -1 otherwise. Steps are accepted
only when the objective does not increase (backtracking on the step size), so
the recorded objective history is non-increasing by construction.

Features are standardized per dimension (train mean/std, std floored at
1e-12) inside svm_train; the standardizer is stored on the model and applied
again at prediction time, after the optional PCA/LDA projection.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutMismatch
from .fusion import FeatureLayout
from .reduction import LdaProjection, PcaProjection

MODEL_MAGIC = "MF2SCF-MODEL"
MODEL_VERSION = 1

STD_FLOOR = 1e-12
DEFAULT_PASSES = 400
_BACKTRACK_LIMIT = 40


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=np.float64)
        return cls(mean=X.mean(axis=0), std=np.maximum(X.std(axis=0), STD_FLOOR))

    def apply(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std


@dataclass
class Model:
    class_names: list
    weights: np.ndarray  # (C, d)
    bias: np.ndarray  # (C,)
    standardizer: Standardizer
    projection: object  # PcaProjection | LdaProjection | None
    layout: FeatureLayout
    fingerprint: str
    c_penalty: float = 1.0
    objective_history: list = field(default_factory=list, repr=False)

    def save(self, path):
        write_model(self, path)

    @classmethod
    def load(cls, path):
        return read_model(path)


def svm_train(X, y, n_classes, c_penalty=1.0, seed=0, max_passes=DEFAULT_PASSES):
    """Fit one-vs-rest hinge-loss linear classifiers.

    Returns (standardizer, weights, bias, objective_history). The optimizer
    starts from zero weights and uses no randomness, so training is
    deterministic for any seed; the seed parameter is part of the contract
    and reserved for future stochastic variants.
    """
    del seed
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    std = Standardizer.fit(X)
    Z = std.apply(X)
    Y = np.where(y[:, None] == np.arange(n_classes)[None, :], 1.0, -1.0)

    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)

    def objective(W_, b_):
        margins = 1.0 - Y * (Z @ W_.T + b_)
        return 0.5 * float((W_ * W_).sum()) + c_penalty * float(
            np.maximum(margins, 0.0).sum()
        )

    J = objective(W, b)
    history = [J]
    lr = 1.0 / (1.0 + c_penalty * n)
    for _ in range(max_passes):
        margins = 1.0 - Y * (Z @ W.T + b)
        active = (margins > 0.0) * Y  # (n, C) signed hinge indicators
        grad_w = W - c_penalty * (active.T @ Z)
        grad_b = -c_penalty * active.sum(axis=0)
        for _attempt in range(_BACKTRACK_LIMIT):
            W2 = W - lr * grad_w
            b2 = b - lr * grad_b
            J2 = objective(W2, b2)
            if J2 <= J:
                W, b, J = W2, b2, J2
                lr *= 1.2
                break
            lr *= 0.5
        history.append(J)
        if lr < 1e-18:
            break
    return std, W, b, history


def decision_scores(model, vectors):
    """Per-class scores after the model's stored projection and standardization."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if vectors.shape[1] != model.layout.total_len:
        raise LayoutMismatch(
            f"vector length {vectors.shape[1]} does not match model layout "
            f"total {model.layout.total_len}"
        )
    x = vectors
    if isinstance(model.projection, PcaProjection):
        x = (x - model.projection.mean) @ model.projection.components.T
    elif isinstance(model.projection, LdaProjection):
        x = x @ model.projection.components.T
    x = model.standardizer.apply(x)
    return x @ model.weights.T + model.bias


def predict(model, vec, fingerprint=None):
    """Predicted class label; ties break toward the lowest class id."""
    if fingerprint is not None and fingerprint != model.fingerprint:
        raise LayoutMismatch(
            f"feature fingerprint {fingerprint} does not match model "
            f"fingerprint {model.fingerprint}"
        )
    scores = decision_scores(model, vec)[0]
    return model.class_names[int(np.argmax(scores))]


def predict_batch(model, X, fingerprint=None):
    if fingerprint is not None and fingerprint != model.fingerprint:
        raise LayoutMismatch(
            f"feature fingerprint {fingerprint} does not match model "
            f"fingerprint {model.fingerprint}"
        )
    scores = decision_scores(model, X)
    return [model.class_names[int(i)] for i in np.argmax(scores, axis=1)]


def _fmt_vec(vec):
    return " ".join(repr(float(v)) for v in np.asarray(vec).ravel())


def _parse_vec(text):
    return np.array([float(tok) for tok in text.split()], dtype=np.float64)


def write_model(model, path):
    """Versioned flat text; floats as repr so a load/save round-trip is
    byte-identical."""
    lines = [MODEL_MAGIC, f"version {MODEL_VERSION}", f"fingerprint {model.fingerprint}"]
    lay = model.layout
    lines.append(f"layout {lay.f1_len} {lay.f2_len} {lay.f3_len}")
    lines.append(f"classes {len(model.class_names)}")
    for code, name in enumerate(model.class_names):
        lines.append(f"class {code} {name}")
    lines.append("section standardizer")
    lines.append(f"mean {_fmt_vec(model.standardizer.mean)}")
    lines.append(f"std {_fmt_vec(model.standardizer.std)}")
    if model.projection is None:
        lines.append("section projection none")
    elif isinstance(model.projection, PcaProjection):
        prj = model.projection
        lines.append("section projection pca")
        lines.append(f"threshold {repr(float(prj.variance_threshold))}")
        lines.append(f"pca_mean {_fmt_vec(prj.mean)}")
        lines.append(f"eigenvalues {_fmt_vec(prj.eigenvalues)}")
        for row in prj.components:
            lines.append(f"component {_fmt_vec(row)}")
    elif isinstance(model.projection, LdaProjection):
        lines.append("section projection lda")
        for row in model.projection.components:
            lines.append(f"component {_fmt_vec(row)}")
    else:
        raise TypeError(f"unknown projection type {type(model.projection)!r}")
    lines.append("section weights")
    lines.append(f"penalty {repr(float(model.c_penalty))}")
    for row in model.weights:
        lines.append(f"weight {_fmt_vec(row)}")
    lines.append(f"bias {_fmt_vec(model.bias)}")
    lines.append("end")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _expect(line, prefix):
    if not line.startswith(prefix):
        raise ValueError(f"model file: expected {prefix!r}, got {line!r}")
    return line[len(prefix) :].strip()


def read_model(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    it = iter(lines)
    if next(it) != MODEL_MAGIC:
        raise ValueError("not a model file (bad magic)")
    version = int(_expect(next(it), "version "))
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported model version {version}")
    fingerprint = _expect(next(it), "fingerprint ")
    lay_parts = _expect(next(it), "layout ").split()
    layout = FeatureLayout(
        f1_len=int(lay_parts[0]), f2_len=int(lay_parts[1]), f3_len=int(lay_parts[2])
    )
    n_classes = int(_expect(next(it), "classes "))
    class_names = []
    for code in range(n_classes):
        body = _expect(next(it), "class ")
        got_code, name = body.split(" ", 1)
        if int(got_code) != code:
            raise ValueError(f"model file: class codes out of order at {code}")
        class_names.append(name)
    _expect(next(it), "section standardizer")
    std = Standardizer(
        mean=_parse_vec(_expect(next(it), "mean ")),
        std=_parse_vec(_expect(next(it), "std ")),
    )
    kind = _expect(next(it), "section projection ")
    projection = None
    if kind == "pca":
        threshold = float(_expect(next(it), "threshold "))
        pca_mean = _parse_vec(_expect(next(it), "pca_mean "))
        eigenvalues = _parse_vec(_expect(next(it), "eigenvalues "))
        rows = []
        for _ in range(eigenvalues.size):
            rows.append(_parse_vec(_expect(next(it), "component ")))
        projection = PcaProjection(
            mean=pca_mean,
            components=np.vstack(rows),
            eigenvalues=eigenvalues,
            variance_threshold=threshold,
        )
    elif kind == "lda":
        rows = []
        line = next(it)
        while line.startswith("component "):
            rows.append(_parse_vec(_expect(line, "component ")))
            line = next(it)
        projection = LdaProjection(components=np.vstack(rows))
        _expect(line, "section weights")
    elif kind != "none":
        raise ValueError(f"unknown projection kind {kind!r}")
    if kind != "lda":
        _expect(next(it), "section weights")
    c_penalty = float(_expect(next(it), "penalty "))
    weights = []
    for _ in range(n_classes):
        weights.append(_parse_vec(_expect(next(it), "weight ")))
    bias = _parse_vec(_expect(next(it), "bias "))
    _expect(next(it), "end")
    return Model(
        class_names=class_names,
        weights=np.vstack(weights),
        bias=bias,
        standardizer=std,
        projection=projection,
        layout=layout,
        fingerprint=fingerprint,
        c_penalty=c_penalty,
    )
