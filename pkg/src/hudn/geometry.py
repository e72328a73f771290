"""Random network layouts, sparse uplink channels, and conflict graphs.

Positions are in meters inside the square ``[0, sqrt(area) * 1000]^2``.
Path loss follows ``P0 * max(d, min_dist)^-alpha`` with Rayleigh fading and
unit noise power.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import SparseComplexMatrix

NOISE_VAR = 1.0
MAX_POISSON_ATTEMPTS = 100


class DegenerateTopologyError(RuntimeError):
    pass


@dataclass
class ScenarioConfig:
    mode: str = "fixed-count"  # "fixed-count" | "poisson"
    n_aps: int = 40
    n_users: int = 32
    ap_density: float = 10.0  # per km^2
    user_density: float = 8.0  # per km^2
    area: float = 10.0  # km^2
    tx_snr_db: float = 95.0  # P0 / noise_var
    pathloss_exp: float = 3.7
    min_dist: float = 1.0  # m
    cov_snr_threshold_db: float = 10.0
    conflict_radius: float = 200.0  # m
    prior_var: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.mode not in ("fixed-count", "poisson"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.area > 0:
            raise ValueError("area must be positive")
        if not self.pathloss_exp > 2:
            raise ValueError("pathloss_exp must exceed 2")
        if not self.min_dist > 0:
            raise ValueError("min_dist must be positive")
        if not self.prior_var > 0:
            raise ValueError("prior_var must be positive")
        if self.mode == "fixed-count":
            if self.n_aps < 1 or self.n_users < 1:
                raise ValueError("fixed-count mode needs n_aps >= 1 and n_users >= 1")
        elif not (self.ap_density > 0 and self.user_density > 0):
            raise ValueError("poisson mode needs positive densities")

    @property
    def side(self) -> float:
        return float(np.sqrt(self.area) * 1000.0)

    @property
    def tx_power(self) -> float:
        return 10.0 ** (self.tx_snr_db / 10.0) * NOISE_VAR


@dataclass
class NetworkTopology:
    ap_positions: np.ndarray  # (N, 2) meters
    user_positions: np.ndarray  # (K, 2) meters
    area: float  # km^2

    @property
    def n_aps(self) -> int:
        return len(self.ap_positions)

    @property
    def n_users(self) -> int:
        return len(self.user_positions)

    def to_json(self) -> dict:
        return {
            "area_km2": self.area,
            "aps": [[float(x), float(y)] for x, y in self.ap_positions],
            "users": [[float(x), float(y)] for x, y in self.user_positions],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NetworkTopology":
        return cls(
            np.asarray(obj["aps"], dtype=float).reshape(-1, 2),
            np.asarray(obj["users"], dtype=float).reshape(-1, 2),
            float(obj["area_km2"]),
        )


@dataclass
class ChannelMatrix:
    """Sparse uplink channel H (rows = APs, columns = users)."""

    matrix: SparseComplexMatrix
    noise_var: float = NOISE_VAR
    prior_var: float = 1.0

    def __post_init__(self):
        vals = self.matrix.values
        if not np.all(np.isfinite(vals)) or np.any(vals == 0):
            raise ValueError("channel coefficients must be finite and nonzero")
        covered = np.zeros(self.n_cols, dtype=bool)
        covered[self.matrix.col_indices] = True
        if not covered.all():
            raise ValueError(f"users without coverage: {np.flatnonzero(~covered).tolist()}")

    @property
    def n_rows(self) -> int:
        return self.matrix.n_rows

    @property
    def n_cols(self) -> int:
        return self.matrix.n_cols

    @property
    def ridge(self) -> float:
        """Regularization noise_var / prior_var of the LMMSE normal equations."""
        return self.noise_var / self.prior_var

    def support(self) -> list[np.ndarray]:
        return [self.matrix.row(n)[0] for n in range(self.n_rows)]

    def to_dense(self) -> np.ndarray:
        return self.matrix.to_dense()

    @classmethod
    def from_dense(cls, dense, noise_var=NOISE_VAR, prior_var=1.0) -> "ChannelMatrix":
        return cls(SparseComplexMatrix.from_dense(dense), noise_var, prior_var)


@dataclass
class ConflictGraph:
    n_vertices: int
    edges: list = field(default_factory=list)  # (i, j, weight) with i < j

    def __post_init__(self):
        seen = set()
        for i, j, w in self.edges:
            if not (0 <= i < j < self.n_vertices):
                raise ValueError(f"bad edge ({i}, {j})")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            if not w > 0:
                raise ValueError(f"edge ({i}, {j}) has non-positive weight")
            seen.add((i, j))

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj = [[] for _ in range(self.n_vertices)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        for nbrs in adj:
            nbrs.sort()
        return adj

    def to_json(self) -> dict:
        return {"n": self.n_vertices, "edges": [[int(i), int(j), float(w)] for i, j, w in self.edges]}

    @classmethod
    def from_json(cls, obj: dict) -> "ConflictGraph":
        return cls(int(obj["n"]), [(int(i), int(j), float(w)) for i, j, w in obj["edges"]])


def _rng(seed, stream: int) -> np.random.Generator:
    # independent streams per purpose so that e.g. fading draws do not
    # depend on how many points the layout consumed
    return np.random.default_rng([int(seed), stream])


def sample_topology(config: ScenarioConfig, seed: int) -> NetworkTopology:
    config.validate()
    rng = _rng(seed, 0)
    side = config.side
    if config.mode == "fixed-count":
        n_aps, n_users = config.n_aps, config.n_users
    else:
        for _ in range(MAX_POISSON_ATTEMPTS):
            n_aps = int(rng.poisson(config.ap_density * config.area))
            n_users = int(rng.poisson(config.user_density * config.area))
            if n_aps > 0 and n_users > 0:
                break
        else:
            raise DegenerateTopologyError(
                f"Poisson draw empty after {MAX_POISSON_ATTEMPTS} attempts (seed {seed})"
            )
    aps = rng.uniform(0.0, side, size=(n_aps, 2))
    users = rng.uniform(0.0, side, size=(n_users, 2))
    return NetworkTopology(aps, users, config.area)


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff ** 2, axis=-1))


def average_snr(topo: NetworkTopology, config: ScenarioConfig) -> np.ndarray:
    """(N, K) average received SNR, linear."""
    d = np.maximum(pairwise_distances(topo.ap_positions, topo.user_positions), config.min_dist)
    return config.tx_power * d ** (-config.pathloss_exp) / NOISE_VAR


def coverage_mask(topo: NetworkTopology, config: ScenarioConfig) -> np.ndarray:
    """AP n serves user k if the average SNR clears the threshold, or if n is
    the strongest AP for k."""
    snr = average_snr(topo, config)
    keep = snr >= 10.0 ** (config.cov_snr_threshold_db / 10.0)
    keep[np.argmax(snr, axis=0), np.arange(topo.n_users)] = True
    return keep


def synth_channels(topo: NetworkTopology, config: ScenarioConfig, seed: int) -> ChannelMatrix:
    if topo.n_aps == 0 or topo.n_users == 0:
        raise DegenerateTopologyError("topology has no APs or no users")
    rng = _rng(seed, 1)
    shape = (topo.n_aps, topo.n_users)
    # draw the full fading matrix so kept entries do not depend on the threshold
    fading = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    gain = np.sqrt(average_snr(topo, config) * NOISE_VAR)
    H = gain * fading
    return ChannelMatrix(
        SparseComplexMatrix.from_dense(H, keep=coverage_mask(topo, config)),
        noise_var=NOISE_VAR,
        prior_var=config.prior_var,
    )


def build_conflict_graph(topo: NetworkTopology, config: ScenarioConfig) -> ConflictGraph:
    if topo.n_users < 1:
        raise DegenerateTopologyError("conflict graph needs at least one user")
    d = pairwise_distances(topo.user_positions, topo.user_positions)
    i, j = np.nonzero(np.triu(d <= config.conflict_radius, k=1))
    w = 1.0 / np.maximum(d[i, j], config.min_dist)
    return ConflictGraph(topo.n_users, [(int(a), int(b), float(c)) for a, b, c in zip(i, j, w)])


def save_json(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f)
        f.write("\n")
