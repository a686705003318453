"""Quadrature rules and direction search on the unit circle and sphere."""

from __future__ import annotations

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def sphere_rule(n_theta: int = 64, n_phi: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in cos(theta) times a periodic trapezoid in phi.

    Returns ``(points, weights)`` with weights summing to 1, i.e. the rule
    approximates the normalized measure ``sin(theta) dtheta dphi / 4 pi``.
    """
    x, w = np.polynomial.legendre.leggauss(int(n_theta))
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    st = np.sqrt(1.0 - x**2)
    pts = np.stack(
        [
            np.outer(st, np.cos(phi)),
            np.outer(st, np.sin(phi)),
            np.outer(x, np.ones(n_phi)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    wts = np.outer(w / 2.0, np.full(n_phi, 1.0 / n_phi)).ravel()
    return pts, wts


def circle_rule(n: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Periodic trapezoid on the x-y great circle, weights summing to 1."""
    phi = np.arange(n) * (2.0 * np.pi / n)
    pts = np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1)
    return pts, np.full(n, 1.0 / n)


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` near-uniform unit vectors on the sphere (golden-angle spiral)."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    ang = np.pi * (3.0 - np.sqrt(5.0)) * k
    return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)


def direction(theta: float, phi: float) -> np.ndarray:
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def to_angles(u) -> tuple[float, float]:
    u = np.asarray(u, dtype=float)
    return float(np.arccos(np.clip(u[2], -1.0, 1.0))), float(np.arctan2(u[1], u[0]))


def golden_max(f, lo: float, hi: float, tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def _chunked_scores(dirs: np.ndarray, pts: np.ndarray, wts: np.ndarray, chunk: int = 512) -> np.ndarray:
    out = np.empty(len(dirs))
    for i in range(0, len(dirs), chunk):
        out[i : i + chunk] = np.abs(dirs[i : i + chunk] @ pts.T) @ wts
    return out


def projection_score(u, pts: np.ndarray, wts: np.ndarray) -> float:
    """``sum_i w_i |n_i . u|``, the quadrature of the absolute projection."""
    return float(np.abs(pts @ u) @ wts)


def refine_direction(
    pts: np.ndarray,
    wts: np.ndarray,
    start,
    step: float = 0.05,
    tol: float = 1e-7,
    max_rounds: int = 40,
) -> tuple[float, np.ndarray]:
    """Coordinate-wise golden-section ascent in (theta, phi) from ``start``."""
    theta, phi = to_angles(start)
    best = projection_score(direction(theta, phi), pts, wts)
    for _ in range(max_rounds):
        prev = best
        theta, _ = golden_max(lambda t: projection_score(direction(t, phi), pts, wts), theta - step, theta + step, tol)
        phi, best = golden_max(lambda p: projection_score(direction(theta, p), pts, wts), phi - step, phi + step, tol)
        if best - prev < 1e-12:
            step *= 0.5
            if step < tol:
                break
    u = direction(theta, phi)
    return projection_score(u, pts, wts), u


def maximize_projection(
    pts: np.ndarray,
    wts: np.ndarray,
    n_seed: int = 10_000,
    start=None,
) -> tuple[float, np.ndarray]:
    """Maximize ``u -> sum_i w_i |n_i . u|`` over unit vectors ``u``.

    A Fibonacci-lattice scan with ``n_seed`` directions picks a start, which
    golden-section refinement then polishes. Passing ``start`` skips the scan.
    """
    if start is None:
        seeds = fibonacci_sphere(n_seed)
        scores = _chunked_scores(seeds, pts, wts)
        start = seeds[int(np.argmax(scores))]
        step = 2.0 * np.sqrt(4.0 * np.pi / n_seed)
    else:
        step = 0.01
    return refine_direction(pts, wts, start, step=step)
