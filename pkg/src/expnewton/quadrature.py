"""Composite and adaptive Gauss-Legendre quadrature."""

from __future__ import annotations

import heapq
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as leg


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1]."""
    x, w = leg.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def spectral_integration_matrix(n: int) -> np.ndarray:
    """``S[i, j] = integral from -1 to x_i of the j-th Lagrange basis polynomial``.

    Applied to samples of a smooth function at the Gauss nodes this returns
    its running integral at the same nodes, exact for degree < n.
    """
    x, _ = gauss_legendre(n)
    V = leg.legvander(x, n - 1)
    A = np.empty((n, n))
    for k in range(n):
        c = np.zeros(n)
        c[k] = 1.0
        A[:, k] = leg.legval(x, leg.legint(c, lbnd=-1.0))
    S = A @ np.linalg.inv(V)
    S.setflags(write=False)
    return S


class PanelGrid:
    """Uniform panels on [a, b] with ``nodes`` Gauss points per panel."""

    def __init__(self, a: float, b: float, panels: int = 64, nodes: int = 8):
        self.a, self.b = float(a), float(b)
        self.panels, self.q = int(panels), int(nodes)
        self.edges = np.linspace(self.a, self.b, self.panels + 1)
        self.h = (self.b - self.a) / self.panels
        x, w = gauss_legendre(self.q)
        self._x = x
        mid = 0.5 * (self.edges[:-1] + self.edges[1:])
        self.nodes = mid[:, None] + 0.5 * self.h * x[None, :]
        self.weights = np.broadcast_to(0.5 * self.h * w, self.nodes.shape)
        self.S = spectral_integration_matrix(self.q)
        self._vinv = np.linalg.inv(leg.legvander(x, self.q - 1))

    @property
    def points(self) -> np.ndarray:
        """All sample locations, sorted: every edge and every node."""
        pts = np.concatenate([self.edges, self.nodes.ravel()])
        return np.sort(pts)

    def split(self, at_edges: np.ndarray, at_nodes: np.ndarray) -> np.ndarray:
        """Merge edge and node values into the order of ``points``."""
        vals = np.concatenate([at_edges, at_nodes.ravel()])
        order = np.argsort(np.concatenate([self.edges, self.nodes.ravel()]), kind="stable")
        return vals[order]

    def unmerge(self, values: np.ndarray):
        order = np.argsort(np.concatenate([self.edges, self.nodes.ravel()]), kind="stable")
        flat = np.empty_like(values)
        flat[order] = values
        return flat[: self.panels + 1], flat[self.panels + 1:].reshape(self.nodes.shape)

    def cumulative(self, at_nodes: np.ndarray, start: float = 0.0):
        """Running integral from ``a``; returns (values at edges, values at nodes)."""
        _, w = gauss_legendre(self.q)
        panel = 0.5 * self.h * (at_nodes @ w)
        at_edges = start + np.concatenate([[0.0], np.cumsum(panel)])
        inner = at_edges[:-1, None] + 0.5 * self.h * (at_nodes @ self.S.T)
        return at_edges, inner

    def _locate(self, r):
        r = np.asarray(r, dtype=float)
        k = np.clip(((r - self.a) / self.h).astype(int), 0, self.panels - 1)
        xi = 2.0 * (r - self.edges[k]) / self.h - 1.0
        return k, xi

    def interpolate(self, at_nodes: np.ndarray, r):
        """Evaluate the per-panel interpolating polynomial at ``r``."""
        k, xi = self._locate(r)
        coef = at_nodes[k] @ self._vinv.T
        return np.array([leg.legval(z, c) for z, c in zip(np.atleast_1d(xi), np.atleast_2d(coef))]).reshape(np.shape(r))

    def integrate_to(self, at_nodes: np.ndarray, at_edges_cum: np.ndarray, r):
        """Running integral at arbitrary ``r`` given node samples of the integrand."""
        k, xi = self._locate(r)
        coef = at_nodes[k] @ self._vinv.T
        out = []
        for kk, z, c in zip(np.atleast_1d(k), np.atleast_1d(xi), np.atleast_2d(coef)):
            out.append(at_edges_cum[kk] + 0.5 * self.h * leg.legval(z, leg.legint(c, lbnd=-1.0)))
        return np.array(out).reshape(np.shape(r))


def adaptive_gauss_legendre(fun, a: float, b: float, *, rtol: float = 1e-10, atol: float = 1e-15,
                            n: int = 10, breakpoints=(), max_intervals: int = 20_000):
    """Globally adaptive quadrature of a vectorised ``fun`` over [a, b].

    Each interval is estimated with n and 2n point Gauss rules; the interval
    with the largest discrepancy is bisected until the summed discrepancy is
    below ``max(atol, rtol * |I|)``.  Returns ``(value, error_estimate)`` where
    the estimate is the summed discrepancy.
    """
    x1, w1 = gauss_legendre(n)
    x2, w2 = gauss_legendre(2 * n)

    def rule(lo, hi):
        c, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
        coarse = hw * float(np.dot(w1, fun(c + hw * x1)))
        fine = hw * float(np.dot(w2, fun(c + hw * x2)))
        return fine, abs(fine - coarse)

    cuts = sorted({float(a), float(b), *[float(p) for p in breakpoints if a < p < b]})
    heap = []
    total = err = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        val, e = rule(lo, hi)
        total += val
        err += e
        heapq.heappush(heap, (-e, lo, hi, val))
    while err > max(atol, rtol * abs(total)) and len(heap) < max_intervals:
        neg_e, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_e, lo, hi, val))
            break
        v1, e1 = rule(lo, mid)
        v2, e2 = rule(mid, hi)
        total += v1 + v2 - val
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    # recompute sums to shed accumulated round-off
    total = sum(item[3] for item in heap)
    err = sum(-item[0] for item in heap)
    return total, err
