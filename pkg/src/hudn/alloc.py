"""Channel assignment by clamped harmonic label propagation on the conflict graph.

Pre-labeled (boundary) users keep their channel; every other user's score
vector becomes the weight-normalized average of its neighbors' scores.
"""
from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .geometry import ConflictGraph


class UnreachableVertexError(ValueError):
    def __init__(self, vertices):
        self.vertices = sorted(int(v) for v in vertices)
        super().__init__(f"vertices unreachable from every seed: {self.vertices}")


@dataclass
class SeedLabels:
    n_labels: int
    assignments: dict  # vertex -> label

    def __post_init__(self):
        if self.n_labels < 1:
            raise ValueError("n_labels must be at least 1")
        self.assignments = {int(v): int(l) for v, l in self.assignments.items()}
        for v, l in self.assignments.items():
            if not 0 <= l < self.n_labels:
                raise ValueError(f"vertex {v}: label {l} outside [0, {self.n_labels})")

    @classmethod
    def from_json(cls, obj: dict) -> "SeedLabels":
        return cls(int(obj["n_labels"]), {int(v): int(l) for v, l in obj["seeds"].items()})

    def to_json(self) -> dict:
        return {"n_labels": self.n_labels, "seeds": {str(v): l for v, l in sorted(self.assignments.items())}}


@dataclass
class LabelAssignment:
    scores: np.ndarray  # (V, L)
    labels: np.ndarray  # (V,)
    iterations: int
    converged: bool = True


def _check(g: ConflictGraph, seeds: SeedLabels, adj) -> None:
    if not seeds.assignments:
        raise ValueError("seed set is empty")
    for v in seeds.assignments:
        if not 0 <= v < g.n_vertices:
            raise ValueError(f"seed vertex {v} outside the graph")
    seen = np.zeros(g.n_vertices, dtype=bool)
    queue = deque(seeds.assignments)
    seen[list(seeds.assignments)] = True
    while queue:
        v = queue.popleft()
        for u, _ in adj[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    if not seen.all():
        raise UnreachableVertexError(np.flatnonzero(~seen))


def _seed_matrix(g: ConflictGraph, seeds: SeedLabels) -> np.ndarray:
    F = np.full((g.n_vertices, seeds.n_labels), 1.0 / seeds.n_labels)
    for v, l in seeds.assignments.items():
        F[v] = 0.0
        F[v, l] = 1.0
    return F


def argmax_labels(scores: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. the lowest label on ties
    return np.argmax(scores, axis=1)


def propagate_labels(
    g: ConflictGraph, seeds: SeedLabels, tol: float = 1e-6, max_iter: int = 10_000
) -> LabelAssignment:
    """Gauss-Seidel harmonic propagation, vertices swept in ascending order.

    Stops once the largest score change in a sweep is <= tol.
    """
    adj = g.adjacency()
    _check(g, seeds, adj)
    F = _seed_matrix(g, seeds)
    free = [v for v in range(g.n_vertices) if v not in seeds.assignments]
    nbr_idx = [np.array([u for u, _ in adj[v]], dtype=int) for v in range(g.n_vertices)]
    nbr_w = [np.array([w for _, w in adj[v]]) for v in range(g.n_vertices)]

    iterations, converged = 0, not free
    while free and iterations < max_iter:
        iterations += 1
        delta = 0.0
        for v in free:
            w = nbr_w[v]
            new = (w @ F[nbr_idx[v]]) / w.sum()
            delta = max(delta, float(np.max(np.abs(new - F[v]))))
            F[v] = new
        if delta <= tol:
            converged = True
            break
    return LabelAssignment(F, argmax_labels(F), iterations, converged)


def harmonic_oracle(g: ConflictGraph, seeds: SeedLabels) -> np.ndarray:
    """Direct solve of the clamped Laplacian system L_uu F_u = W_us F_s."""
    adj = g.adjacency()
    _check(g, seeds, adj)
    V = g.n_vertices
    W = np.zeros((V, V))
    for i, j, w in g.edges:
        W[i, j] = W[j, i] = w
    F = _seed_matrix(g, seeds)
    seeded = sorted(seeds.assignments)
    free = [v for v in range(V) if v not in seeds.assignments]
    if not free:
        return F
    Lap = np.diag(W.sum(axis=1)) - W
    Luu = Lap[np.ix_(free, free)]
    rhs = W[np.ix_(free, seeded)] @ F[seeded]
    try:
        F[free] = np.linalg.solve(Luu, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("harmonic system is singular (vertices cut off from seeds)") from exc
    return F


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_assignment_csv(result: LabelAssignment, path) -> None:
    n_labels = result.scores.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["vertex", "label"] + [f"score_{l}" for l in range(n_labels)])
        for v, (label, row) in enumerate(zip(result.labels, result.scores)):
            w.writerow([v, int(label)] + [repr(float(s)) for s in row])
