"""Shallow anomaly detectors sharing a ``fit(X, y, mask, seed)`` / ``score(X)`` contract."""

from .base import BaseDetector, training_target
from .cblof import CBLOF, cblof_score
from .ecdf import COPOD, ECOD, copod_score, ecod_score
from .histogram import HBOS, LODA, hbos_score, loda_score
from .iforest import IForest, average_path_length, iforest_score
from .neighbors import KNN, LOF, kneighbors, knn_score, lof_score
from .pca import PCA, pca_fit_score
from .registry import DETECTORS, LABEL_INFORMED, UNSUPERVISED, make_detector
from .stacking import DEFAULT_ROSTER, ScoreStack, scorestack_fit_predict
from .supervised import GaussianNB, RandomForest, gnb_fit_predict, rforest_fit_predict

__all__ = [
    "BaseDetector", "training_target", "make_detector", "DETECTORS", "UNSUPERVISED",
    "LABEL_INFORMED", "DEFAULT_ROSTER", "PCA", "KNN", "LOF", "CBLOF", "HBOS", "ECOD",
    "COPOD", "IForest", "LODA", "GaussianNB", "RandomForest", "ScoreStack", "kneighbors",
    "average_path_length", "pca_fit_score", "knn_score", "lof_score", "cblof_score",
    "hbos_score", "ecod_score", "copod_score", "iforest_score", "loda_score",
    "gnb_fit_predict", "rforest_fit_predict", "scorestack_fit_predict",
]
