"""CHSH functionals and the Horodecki criterion.

Includes a reentrant Jacobi singular-value routine for 3x3 matrices (the
only linear algebra the hot paths need), the raw CHSH value of four
observables on a two-qubit state, the Horodecki-optimal CHSH value reachable
downstream, and the tight strength/angle upper bound on the singlet CHSH
together with its 3x3 W-matrix form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintViolation, NegativeRadicand
from .observables import Observable
from .states import TwoQubitState

_JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 50


@dataclass(frozen=True)
class MeasurementPair:
    """The two observables one observer chooses between with equal odds."""

    first: Observable
    second: Observable


def _pair_expectation(state: TwoQubitState, x: Observable, y: Observable) -> float:
    """<XY> = (B_X, S_X x^T) Theta (B_Y; S_Y y)."""
    left = np.concatenate(([x.bias], x.strength * x.direction))
    right = np.concatenate(([y.bias], y.strength * y.direction))
    return float(left @ state.theta @ right)


def chsh_value(state: TwoQubitState, alice: MeasurementPair, bob: MeasurementPair) -> float:
    """S = <XY> + <XY'> + <X'Y> - <X'Y'> for the given setting pairs."""
    return (
        _pair_expectation(state, alice.first, bob.first)
        + _pair_expectation(state, alice.first, bob.second)
        + _pair_expectation(state, alice.second, bob.first)
        - _pair_expectation(state, alice.second, bob.second)
    )


def _jacobi_eigvals_sym3(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations."""
    a = A.copy()
    scale = max(float(np.sqrt((a * a).sum())), 1e-300)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = max(abs(a[0, 1]), abs(a[0, 2]), abs(a[1, 2]))
        if off <= _JACOBI_TOL * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if abs(apq) <= _JACOBI_TOL * scale * 1e-2:
                continue
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
    return np.diag(a).copy()


def svd3(M) -> tuple[float, float, float]:
    """Singular values of a real 3x3 matrix, descending.

    Computed as square roots of the eigenvalues of M^T M, themselves obtained
    with Jacobi rotations; no global workspace, safe to call concurrently.
    """
    M = np.asarray(M, dtype=float).reshape(3, 3)
    eigs = _jacobi_eigvals_sym3(M.T @ M)
    eigs = np.sqrt(np.clip(np.sort(eigs)[::-1], 0.0, None))
    return float(eigs[0]), float(eigs[1]), float(eigs[2])


def singular_values_batch(M: np.ndarray, sweeps: int = 30) -> np.ndarray:
    """Descending singular values of a stack of 3x3 matrices, shape (n, 3).

    Same Jacobi scheme as svd3, vectorised over the stack; used by the
    sampling audits and the optimizer hot loop.
    """
    M = np.asarray(M, dtype=float)
    A = M.transpose(0, 2, 1) @ M
    n = A.shape[0]
    scale = np.maximum(np.sqrt((A * A).sum(axis=(1, 2))), 1e-300)
    eye = np.broadcast_to(np.eye(3), (n, 3, 3))
    for _ in range(sweeps):
        off = np.max(np.abs(A[:, (0, 0, 1), (1, 2, 2)]), axis=1)
        if np.all(off <= _JACOBI_TOL * scale):
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = A[:, p, q]
            active = np.abs(apq) > _JACOBI_TOL * scale * 1e-2
            safe = np.where(active, apq, 1.0)
            tau = (A[:, q, q] - A[:, p, p]) / (2.0 * safe)
            t = np.copysign(1.0, tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c = np.where(active, c, 1.0)
            s = np.where(active, s, 0.0)
            rot = eye.copy()
            rot[:, p, p] = c
            rot[:, q, q] = c
            rot[:, p, q] = s
            rot[:, q, p] = -s
            A = rot.transpose(0, 2, 1) @ A @ rot
    eigs = A[:, (0, 1, 2), (0, 1, 2)]
    return np.sqrt(np.clip(np.sort(eigs, axis=1)[:, ::-1], 0.0, None))


def horodecki_sstar(T) -> float:
    """Optimal downstream CHSH value 2*sqrt(s1^2 + s2^2) of a correlation matrix."""
    s1, s2, _ = svd3(T)
    if s1 > 1.0 + 1e-9:
        raise ConstraintViolation(f"largest singular value {s1} exceeds 1")
    return 2.0 * math.sqrt(s1 * s1 + s2 * s2)


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two direction vectors, stable near 0 and pi."""
    u = np.asarray(u, dtype=float).reshape(3)
    v = np.asarray(v, dtype=float).reshape(3)
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(u @ v))


@dataclass(frozen=True)
class WMatrix:
    """The 3x3 strength/relative-angle matrix of the singlet CHSH form."""

    entries: np.ndarray = field(repr=False)
    angle_theta: float
    angle_phi: float

    def __post_init__(self):
        self.entries.setflags(write=False)


def w_matrix(sx: float, sxp: float, sy: float, syp: float, theta: float, phi: float) -> WMatrix:
    """Build the W matrix for strengths (sx, sxp, sy, syp) and pair angles.

    theta is the angle between the two settings of the first observer, phi
    between those of the second; only the upper 2x2 block is nonzero.
    """
    A = sx * sy + sx * syp + sxp * sy - sxp * syp
    B = sx * sy - sx * syp + sxp * sy + sxp * syp
    C = sx * sy + sx * syp - sxp * sy + sxp * syp
    D = -sx * sy + sx * syp + sxp * sy + sxp * syp
    ct, st = math.cos(theta / 2.0), math.sin(theta / 2.0)
    cp, sp = math.cos(phi / 2.0), math.sin(phi / 2.0)
    entries = np.zeros((3, 3))
    entries[0, 0] = A * ct * cp
    entries[0, 1] = B * ct * sp
    entries[1, 0] = C * st * cp
    entries[1, 1] = -D * st * sp
    return WMatrix(entries=entries, angle_theta=theta, angle_phi=phi)


def s0_bound(sx: float, sxp: float, sy: float, syp: float, theta: float, phi: float) -> float:
    """Tight upper bound on |CHSH| for unbiased observables on the singlet."""
    radicand = (
        (sx * sx + sxp * sxp) * (sy * sy + syp * syp)
        + 2.0 * sx * sxp * (sy * sy - syp * syp) * math.cos(theta)
        + 2.0 * sy * syp * (sx * sx - sxp * sxp) * math.cos(phi)
        + 4.0 * sx * sxp * sy * syp * math.sin(theta) * math.sin(phi)
    )
    if radicand < -1e-9:
        raise NegativeRadicand(f"S0 radicand {radicand} is negative")
    return math.sqrt(max(radicand, 0.0))


def s0_from_w(w: WMatrix) -> float:
    """S0 as s1(W) + s2(W) via the trace/determinant of the upper 2x2 block."""
    block = w.entries[:2, :2]
    return math.sqrt(float(np.trace(block.T @ block)) + 2.0 * abs(float(np.linalg.det(block))))
