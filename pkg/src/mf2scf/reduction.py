"""PCA and LDA projections applied between fusion and the SVM.

Both are fit on raw fused training vectors. PCA keeps the smallest number of
principal components whose cumulative explained variance reaches the
threshold; LDA solves the ridge-regularized generalized eigenproblem of the
between/within scatter matrices and keeps at most C-1 directions.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ClassTooSmall, DegenerateCovariance, SingularScatter

LDA_RIDGE = 1e-6


@dataclass
class PcaProjection:
    mean: np.ndarray
    components: np.ndarray  # (k, d)
    eigenvalues: np.ndarray  # sample variance captured by each component
    variance_threshold: float

    @property
    def n_components(self):
        return self.components.shape[0]


def pca_fit(X, variance_threshold=0.95):
    """Centered PCA keeping the fewest components reaching the variance threshold."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("PCA needs at least 2 training vectors")
    if not 0.0 < variance_threshold <= 1.0:
        raise ValueError(f"variance threshold must be in (0, 1], got {variance_threshold}")
    mean = X.mean(axis=0)
    Xc = X - mean
    if not np.any(Xc):
        raise DegenerateCovariance("all training vectors are identical")
    _, svals, vt = np.linalg.svd(Xc, full_matrices=False)
    variances = svals**2 / (X.shape[0] - 1)
    ratios = variances / variances.sum()
    cum = np.cumsum(ratios)
    k = int(np.argmax(cum >= variance_threshold - 1e-12)) + 1
    return PcaProjection(
        mean=mean,
        components=vt[:k].copy(),
        eigenvalues=variances[:k].copy(),
        variance_threshold=variance_threshold,
    )


def pca_transform(projection, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return (X - projection.mean) @ projection.components.T


@dataclass
class LdaProjection:
    components: np.ndarray  # (k, d), k <= n_classes - 1

    @property
    def n_components(self):
        return self.components.shape[0]


def lda_fit(X, labels, ridge=LDA_RIDGE):
    """Fisher discriminant directions from the regularized scatter eigenproblem."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    n_classes = classes.size
    if n_classes < 2:
        raise ClassTooSmall("LDA needs at least 2 classes")
    d = X.shape[1]
    overall = X.mean(axis=0)
    sw = np.zeros((d, d))
    sb = np.zeros((d, d))
    for c in classes:
        pts = X[labels == c]
        if pts.shape[0] < 2:
            raise ClassTooSmall(f"class {c} has {pts.shape[0]} record(s); need at least 2")
        mu = pts.mean(axis=0)
        centered = pts - mu
        sw += centered.T @ centered
        delta = (mu - overall)[:, None]
        sb += pts.shape[0] * (delta @ delta.T)
    trace = np.trace(sw)
    reg = ridge * trace / d if trace > 0 else ridge
    sw_reg = sw + reg * np.eye(d)
    try:
        evals, evecs = scipy.linalg.eigh(sb, sw_reg)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularScatter(f"generalized scatter eigenproblem failed: {exc}") from exc
    k = min(n_classes - 1, d)
    order = np.argsort(evals)[::-1][:k]
    return LdaProjection(components=evecs[:, order].T.copy())


def lda_transform(projection, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return X @ projection.components.T
