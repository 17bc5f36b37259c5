"""Random forest of binary Gini decision trees for candidate scoring."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import *
from .utils import DataError

LEAF = -1


@dataclass
class DecisionTree:
    """Flat array tree. Node 0 is the root; a sample goes left when
    ``x[feature] <= threshold``. Leaves have feature -1 and hold the fraction
    of positive training samples that reached them."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = [0] * self.n_nodes
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return max(depths)

    def predict(self, X: np.ndarray) -> np.ndarray:
        rows = np.arange(len(X))
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            feature = self.feature[node]
            inner = feature != LEAF
            if not inner.any():
                return self.value[node]
            go_left = X[rows, np.where(inner, feature, 0)] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)

    def to_json(self) -> Dict[str, List]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Sequence]) -> "DecisionTree":
        tree = cls(
            np.array(data["feature"], dtype=np.int64),
            np.array(data["threshold"], dtype=np.float64),
            np.array(data["left"], dtype=np.int64),
            np.array(data["right"], dtype=np.int64),
            np.array(data["value"], dtype=np.float64),
        )
        n = tree.n_nodes
        if n == 0 or any(len(a) != n for a in (tree.threshold, tree.left, tree.right, tree.value)):
            raise DataError("malformed decision tree")
        inner = tree.feature != LEAF
        if np.any(tree.left[inner] <= np.flatnonzero(inner)) or np.any(tree.right[inner] >= n):
            raise DataError("decision tree links are out of order")
        return tree


def gini(positives: np.ndarray, totals: np.ndarray) -> np.ndarray:
    p = positives / totals
    return 2 * p * (1 - p)


def best_split(
    X: np.ndarray, y: np.ndarray, features: Sequence[int], min_leaf: int
) -> Optional[Tuple[int, float]]:
    """Lowest weighted Gini split over the given features, or None if no
    split keeps min_leaf samples on both sides and lowers the impurity."""
    n = len(y)
    best_score = gini(np.array(y.sum(), dtype=np.float64), np.array(n, dtype=np.float64))
    best = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        values = X[order, f]
        positives = np.cumsum(y[order])[:-1]
        n_left = np.arange(1, n, dtype=np.float64)
        n_right = n - n_left

        valid = (values[:-1] < values[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        scores = (
            n_left * gini(positives, n_left)
            + n_right * gini(positives[-1] + y[order][-1] - positives, n_right)
        ) / n
        scores[~valid] = np.inf
        k = int(np.argmin(scores))
        if scores[k] < best_score:
            best_score = scores[k]
            best = (int(f), float((values[k] + values[k + 1]) / 2))
    return best


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    max_depth: Optional[int] = None,
    min_leaf: int = 5,
    max_features: Optional[int] = None,
) -> DecisionTree:
    n_features = X.shape[1]
    max_features = max_features or math.ceil(math.sqrt(n_features))
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[float] = []

    def new_node(samples: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[samples].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, samples, depth = stack.pop()
        labels = y[samples]
        if (
            (max_depth is not None and depth >= max_depth)
            or len(samples) < 2 * min_leaf
            or labels.min() == labels.max()
        ):
            continue
        subset = rng.choice(n_features, size=min(max_features, n_features), replace=False)
        split = best_split(X[samples], labels, subset, min_leaf)
        if split is None:
            continue

        f, t = split
        goes_left = X[samples, f] <= t
        feature[node], threshold[node] = f, t
        left[node] = new_node(samples[goes_left])
        right[node] = new_node(samples[~goes_left])
        stack.append((right[node], samples[~goes_left], depth + 1))
        stack.append((left[node], samples[goes_left], depth + 1))

    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
    )


@dataclass
class RandomForest:
    trees: List[DecisionTree]
    n_features: int
    max_depth: Optional[int] = None
    min_leaf: int = 5
    max_features: Optional[int] = None
    seed: int = DEFAULT_SEED
    bootstrap: bool = True
    oob_accuracy: Optional[float] = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        """Mean leaf estimate over all trees for every row of X.

        Raises:
            ValueError: For an empty forest or rows of the wrong width
        """
        if not self.trees:
            raise ValueError("cannot predict with an empty forest")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected feature vectors of length {self.n_features}, got shape {X.shape}"
            )
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)

    def predict_proba(self, fv: Sequence[float]) -> float:
        return float(self.predict_proba_batch(np.asarray(fv, dtype=np.float64)[None, :])[0])

    def to_json(self) -> Dict[str, Any]:
        return {
            "trees": [tree.to_json() for tree in self.trees],
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "max_features": self.max_features,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "oob_accuracy": self.oob_accuracy,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "RandomForest":
        try:
            return cls(
                [DecisionTree.from_json(t) for t in data["trees"]],
                int(data["n_features"]),
                data["max_depth"],
                int(data["min_leaf"]),
                data["max_features"],
                int(data["seed"]),
                bool(data["bootstrap"]),
                data["oob_accuracy"],
            )
        except (KeyError, TypeError, ValueError):
            raise DataError("malformed random forest")


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 200,
    max_depth: Optional[int] = None,
    min_leaf: int = 5,
    seed: int = DEFAULT_SEED,
    n_jobs: int = 1,
    bootstrap: bool = True,
    max_features: Optional[int] = None,
) -> RandomForest:
    """Trains a forest on rows X with binary labels y.

    Tree i draws its bootstrap sample and node feature subsets from
    ``np.random.default_rng(seed + i)``, so the result does not depend on
    n_jobs. With bootstrap sampling the out-of-bag accuracy is stored.

    Raises:
        ValueError: For invalid hyperparameters
        DataError: If y holds a single class
    """
    if n_trees < 1 or min_leaf < 1 or n_jobs < 1:
        raise ValueError("n_trees, min_leaf and n_jobs must be positive")
    if max_depth is not None and max_depth < 0:
        raise ValueError(f"max_depth must not be negative, got {max_depth}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y) or not len(y):
        raise ValueError("X must be a non-empty matrix with one row per label")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature values must be finite")
    if y.min() == y.max():
        raise DataError("training a forest needs positive and negative instances")

    def grow(i: int) -> Tuple[DecisionTree, Optional[np.ndarray]]:
        rng = np.random.default_rng(seed + i)
        if not bootstrap:
            return build_tree(X, y, rng, max_depth, min_leaf, max_features), None
        sample = rng.integers(0, len(y), len(y))
        tree = build_tree(X[sample], y[sample], rng, max_depth, min_leaf, max_features)
        out_of_bag = np.ones(len(y), dtype=bool)
        out_of_bag[sample] = False
        return tree, out_of_bag

    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        grown = list(pool.map(grow, range(n_trees)))

    oob_accuracy = None
    if bootstrap:
        votes = np.zeros(len(y))
        counts = np.zeros(len(y))
        for tree, out_of_bag in grown:
            if out_of_bag.any():
                votes[out_of_bag] += tree.predict(X[out_of_bag])
                counts[out_of_bag] += 1
        scored = counts > 0
        if scored.any():
            predictions = votes[scored] / counts[scored] >= 0.5
            oob_accuracy = float(np.mean(predictions == (y[scored] == 1)))

    return RandomForest(
        [tree for tree, _ in grown],
        X.shape[1],
        max_depth,
        min_leaf,
        max_features,
        seed,
        bootstrap,
        oob_accuracy,
    )


def predict_proba(forest: RandomForest, fv: Sequence[float]) -> float:
    return forest.predict_proba(fv)
