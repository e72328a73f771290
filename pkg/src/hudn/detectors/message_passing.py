"""Gaussian belief propagation on the AP/user factor graph.

Factor n (an AP) observes ``y_n = sum_k h_nk x_k + noise``; variable k is
user k's symbol with prior CN(0, prior_var). Messages are stored in natural
form: precision P and precision-weighted mean Q = P * mean.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..geometry import ChannelMatrix
from .common import DetectionResult, DetectorParams, DivergenceError, Tracker


@dataclass
class FactorGraph:
    n_factors: int
    n_variables: int
    edge_factor: np.ndarray
    edge_var: np.ndarray
    edge_coef: np.ndarray
    factor_edges: list  # factor -> edge ids, variables ascending
    var_edges: list  # variable -> edge ids, factors ascending

    @property
    def n_edges(self) -> int:
        return int(self.edge_coef.size)

    def factor_degrees(self) -> np.ndarray:
        return np.array([len(e) for e in self.factor_edges], dtype=int)

    def variable_degrees(self) -> np.ndarray:
        return np.array([len(e) for e in self.var_edges], dtype=int)

    def factor_neighbors(self, n: int) -> list[int]:
        return [int(self.edge_var[e]) for e in self.factor_edges[n]]

    def variable_neighbors(self, k: int) -> list[int]:
        return [int(self.edge_factor[e]) for e in self.var_edges[k]]

    def is_forest(self) -> bool:
        # a bipartite graph is a forest iff edges = nodes - components
        return self.n_edges == self.n_factors + self.n_variables - _count_components(self)


def _count_components(g: FactorGraph) -> int:
    # union-find over factors [0, N) and variables [N, N + K)
    parent = list(range(g.n_factors + g.n_variables))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for n, k in zip(g.edge_factor.tolist(), g.edge_var.tolist()):
        ra, rb = find(n), find(g.n_factors + k)
        if ra != rb:
            parent[ra] = rb
    return len({find(a) for a in range(len(parent))})


def build_factor_graph(H: ChannelMatrix) -> FactorGraph:
    A = H.matrix
    edge_factor = A.row_ids()
    edge_var = A.col_indices.copy()
    factor_edges = [list(range(A.row_offsets[n], A.row_offsets[n + 1])) for n in range(A.n_rows)]
    var_edges = [[] for _ in range(A.n_cols)]
    for e, k in enumerate(edge_var.tolist()):
        var_edges[k].append(e)  # storage is row-major, so factors arrive ascending
    return FactorGraph(A.n_rows, A.n_cols, edge_factor, edge_var, A.values.copy(), factor_edges, var_edges)


def _exclusive_sums(vals: list) -> list:
    """out[i] = sum of vals without vals[i], via prefix + suffix sums.

    Never forms total - own, which would cancel catastrophically when one
    term dominates (channel gains span ~9 orders of magnitude).
    """
    n = len(vals)
    if n == 1:
        return [0.0]
    pre = [0.0] * n
    acc = 0.0
    for i in range(n - 1):
        acc = acc + vals[i]
        pre[i + 1] = acc
    out = [0.0] * n
    acc = 0.0
    for i in range(n - 1, -1, -1):
        out[i] = pre[i] + acc
        acc = acc + vals[i]
    return out


class _BPState:
    def __init__(self, g: FactorGraph, y, noise_var: float, prior_var: float):
        if any(len(e) == 0 for e in g.var_edges):
            bad = [k for k, e in enumerate(g.var_edges) if not e]
            raise ValueError(f"variables with no factor: {bad}")
        self.g = g
        self.y = [complex(v) for v in np.asarray(y, dtype=np.complex128)]
        if len(self.y) != g.n_factors:
            raise ValueError("y length must equal the number of factors")
        self.noise_var = float(noise_var)
        self.prior_prec = 1.0 / float(prior_var)
        coef = g.edge_coef.tolist()
        self.coef = coef
        self.conj = [c.conjugate() for c in coef]
        self.abs2 = [c.real * c.real + c.imag * c.imag for c in coef]
        m = g.n_edges
        self.f2v_P = [0.0] * m
        self.f2v_Q = [0j] * m
        self.has_f2v = [False] * m
        self.v2f_P = [self.prior_prec] * m
        self.v2f_Q = [0j] * m

    def update_factor(self, n: int, beta: float):
        edges = self.g.factor_edges[n]
        # means and variances of incoming variable-to-factor messages, weighted
        mean_terms = [self.coef[e] * (self.v2f_Q[e] / self.v2f_P[e]) for e in edges]
        var_terms = [self.abs2[e] / self.v2f_P[e] for e in edges]
        other_mean = _exclusive_sums(mean_terms)
        other_var = _exclusive_sums(var_terms)
        yn = self.y[n]
        for i, e in enumerate(edges):
            denom = self.noise_var + other_var[i]
            P = self.abs2[e] / denom
            Q = self.conj[e] * (yn - other_mean[i]) / denom
            if self.has_f2v[e]:
                P = beta * P + (1.0 - beta) * self.f2v_P[e]
                Q = beta * Q + (1.0 - beta) * self.f2v_Q[e]
            self.f2v_P[e] = P
            self.f2v_Q[e] = Q
            self.has_f2v[e] = True

    def update_variable(self, k: int):
        edges = self.g.var_edges[k]
        other_P = _exclusive_sums([self.f2v_P[e] for e in edges])
        other_Q = _exclusive_sums([self.f2v_Q[e] for e in edges])
        for i, e in enumerate(edges):
            self.v2f_P[e] = self.prior_prec + other_P[i]
            self.v2f_Q[e] = other_Q[i]

    def beliefs(self) -> tuple[np.ndarray, np.ndarray]:
        K = self.g.n_variables
        mean = np.empty(K, dtype=np.complex128)
        prec = np.empty(K)
        for k, edges in enumerate(self.g.var_edges):
            P = self.prior_prec
            Q = 0j
            for e in edges:
                P += self.f2v_P[e]
                Q += self.f2v_Q[e]
            prec[k] = P
            mean[k] = Q / P
        return mean, prec


def run_gaussian_bp(
    g: FactorGraph,
    y,
    noise_var: float,
    prior_var: float,
    params: DetectorParams,
    x_ref,
) -> DetectionResult:
    """Gaussian BP with a flooding, damped-flooding or random sequential schedule.

    ``sync`` ignores ``damping_beta``; ``damped`` and ``random_async`` blend
    each recomputed factor-to-variable message with its previous value. The
    first message on an edge is taken undamped. One sweep over all factors
    counts as one iteration.
    """
    t0 = time.perf_counter()
    st = _BPState(g, y, noise_var, prior_var)
    track = Tracker(x_ref, params)
    beta = 1.0 if params.schedule == "sync" else params.damping_beta
    rng = np.random.default_rng(params.seed)

    mean, prec = st.beliefs()
    done = track.record(mean)
    while not done:
        if params.schedule == "random_async":
            for n in rng.permutation(g.n_factors).tolist():
                st.update_factor(n, beta)
                for e in g.factor_edges[n]:
                    st.update_variable(int(g.edge_var[e]))
        else:
            for n in range(g.n_factors):
                st.update_factor(n, beta)
            for k in range(g.n_variables):
                st.update_variable(k)
        mean, prec = st.beliefs()
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(prec)) and np.all(prec > 0)):
            raise DivergenceError(
                f"non-finite message at sweep {track.t + 1}", track.trajectory, track.t
            )
        done = track.record(mean)
    return track.result(mean, time.perf_counter() - t0, variances=1.0 / prec)
