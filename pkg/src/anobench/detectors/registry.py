from __future__ import annotations

from ..errors import ConfigError
from .base import BaseDetector
from .cblof import CBLOF
from .ecdf import COPOD, ECOD
from .histogram import HBOS, LODA
from .iforest import IForest
from .neighbors import KNN, LOF
from .pca import PCA
from .stacking import ScoreStack
from .supervised import GaussianNB, RandomForest

DETECTORS: dict[str, type[BaseDetector]] = {
    cls.name: cls
    for cls in (PCA, KNN, LOF, CBLOF, HBOS, ECOD, COPOD, IForest, LODA, GaussianNB,
                RandomForest, ScoreStack)
}

UNSUPERVISED = tuple(n for n, c in DETECTORS.items() if not c.label_informed)
LABEL_INFORMED = tuple(n for n, c in DETECTORS.items() if c.label_informed)


def make_detector(name: str, **params) -> BaseDetector:
    """Instantiate a detector by name, validating its parameters."""
    try:
        cls = DETECTORS[name]
    except KeyError:
        raise ConfigError(f"unknown detector {name!r}; choose from {sorted(DETECTORS)}") from None
    return cls(**params)
