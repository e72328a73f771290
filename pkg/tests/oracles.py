"""Brute-force reference routines, deliberately independent of the package."""
import math

import numpy as np


def dense_matvec(A, v):
    n, m = len(A), len(A[0])
    out = []
    for i in range(n):
        s = 0j
        for j in range(m):
            s += complex(A[i][j]) * complex(v[j])
        out.append(s)
    return np.array(out)


def dense_adjoint_matvec(A, v):
    n, m = len(A), len(A[0])
    out = []
    for j in range(m):
        s = 0j
        for i in range(n):
            s += complex(A[i][j]).conjugate() * complex(v[i])
        out.append(s)
    return np.array(out)


def gauss_solve(M, b):
    """Gaussian elimination with partial pivoting on Python complex lists;
    ``b`` may be a vector or a list of right-hand-side columns (2-D)."""
    M = [[complex(x) for x in row] for row in M]
    vec = np.ndim(b) == 1
    B = [[complex(x)] for x in b] if vec else [[complex(x) for x in row] for row in b]
    n = len(M)
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        if abs(M[p][c]) == 0:
            raise ZeroDivisionError("singular")
        M[c], M[p] = M[p], M[c]
        B[c], B[p] = B[p], B[c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
            for k in range(len(B[r])):
                B[r][k] -= f * B[c][k]
    X = [[0j] * len(B[0]) for _ in range(n)]
    for r in range(n - 1, -1, -1):
        for k in range(len(B[0])):
            s = B[r][k] - sum(M[r][j] * X[j][k] for j in range(r + 1, n))
            X[r][k] = s / M[r][r]
    X = np.array(X)
    return X[:, 0] if vec else X


def normal_equations(Hd, y, noise_var=1.0, prior_var=1.0):
    """Form H^H H + (s2/sx2) I and H^H y by explicit loops."""
    Hd = np.asarray(Hd)
    N, K = Hd.shape
    G = [[sum(Hd[n, i].conjugate() * Hd[n, j] for n in range(N)) for j in range(K)] for i in range(K)]
    for i in range(K):
        G[i][i] += noise_var / prior_var
    rhs = [sum(Hd[n, i].conjugate() * y[n] for n in range(N)) for i in range(K)]
    return G, rhs


def lmmse_oracle(Hd, y, noise_var=1.0, prior_var=1.0):
    G, rhs = normal_equations(Hd, y, noise_var, prior_var)
    return gauss_solve(G, rhs)


def brute_support(ap_xy, user_xy, p0, alpha, min_dist, thr_db):
    """Kept (n, k) pairs: SNR above threshold, or the user's strongest AP."""
    thr = 10.0 ** (thr_db / 10.0)
    keep = set()
    for k, (ux, uy) in enumerate(user_xy):
        best, best_n = -1.0, None
        for n, (ax, ay) in enumerate(ap_xy):
            d = max(math.hypot(ax - ux, ay - uy), min_dist)
            snr = p0 * d ** (-alpha)
            if snr >= thr:
                keep.add((n, k))
            if snr > best:
                best, best_n = snr, n
        keep.add((best_n, k))
    return keep


def brute_conflict_edges(user_xy, radius, min_dist):
    out = {}
    for i in range(len(user_xy)):
        for j in range(i + 1, len(user_xy)):
            d = math.hypot(user_xy[i][0] - user_xy[j][0], user_xy[i][1] - user_xy[j][1])
            if d <= radius:
                out[(i, j)] = 1.0 / max(d, min_dist)
    return out


def harmonic_by_elimination(n, edges, seeds, n_labels):
    """Clamped harmonic scores via gauss_solve on the free-vertex Laplacian."""
    W = [[0.0] * n for _ in range(n)]
    for i, j, w in edges:
        W[i][j] = W[j][i] = w
    free = [v for v in range(n) if v not in seeds]
    idx = {v: a for a, v in enumerate(free)}
    L = [[0.0] * len(free) for _ in free]
    R = [[0.0] * n_labels for _ in free]
    for v in free:
        a = idx[v]
        L[a][a] = sum(W[v])
        for u in range(n):
            if W[v][u] == 0:
                continue
            if u in idx:
                L[a][idx[u]] -= W[v][u]
            else:
                R[a][seeds[u]] += W[v][u]
    F = np.zeros((n, n_labels))
    for v, l in seeds.items():
        F[v, l] = 1.0
    if free:
        F[free] = gauss_solve(L, R).real
    return F


def random_tree_channel(rng, max_nodes=20):
    """Random bipartite tree over factors and variables; returns dense H.

    Nodes are attached one at a time to a random existing node of the
    opposite type, so the result is connected and acyclic and every
    variable has at least one factor.
    """
    total = int(rng.integers(2, max_nodes + 1))
    kinds = ["f", "v"]  # node 0 a factor, node 1 a variable, joined
    edges = [(0, 1)]
    for node in range(2, total):
        kind = "f" if rng.random() < 0.5 else "v"
        opp = [i for i, k in enumerate(kinds) if k != kind]
        parent = int(rng.choice(opp))
        kinds.append(kind)
        edges.append((node, parent) if kind == "f" else (parent, node))
    fac = {i: a for a, i in enumerate(i for i, k in enumerate(kinds) if k == "f")}
    var = {i: a for a, i in enumerate(i for i, k in enumerate(kinds) if k == "v")}
    H = np.zeros((len(fac), len(var)), dtype=complex)
    for f, v in edges:
        mag = 10.0 ** rng.uniform(-1, 2)
        H[fac[f], var[v]] = mag * np.exp(2j * np.pi * rng.random())
    return H


def bipartite_diameter(H):
    """Longest shortest path (in edges) between any two nodes of the graph of H."""
    N, K = H.shape
    adj = [[] for _ in range(N + K)]
    for n, k in zip(*np.nonzero(H)):
        adj[n].append(N + k)
        adj[N + k].append(n)
    best = 0
    for s in range(N + K):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for a in frontier:
                for b in adj[a]:
                    if b not in dist:
                        dist[b] = dist[a] + 1
                        nxt.append(b)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best
