"""Gaussian states over a finite-dimensional real inner-product space.

The space Q = R^n carries an SPD Gram matrix and an invertible operator K;
the generating function exp(-M_K(q)/2) with M_K(q) = <K^-1 q | K^-1 q>
determines all moments (Wick pairings), the translation quasi-invariance
cocycle of the underlying Gaussian measure, and a truncated Fock realization
of the ladder operators.  Infinite-mode statements (the trace criterion for
equivalence with the Fock state) are handled through declared eigenvalue
sequence models, never by numerical truncation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NumericalError, ShapeMismatchError
from .series import SeriesVerdict, p_series_verdict


def pair_partitions(m: int):
    """All partitions of {0..m-1} into ordered pairs (i < j), deterministic order.

    Yields lists of (m//2) pairs; there are (m-1)!! of them for even m.
    """
    idx = tuple(range(m))

    def rec(remaining):
        if not remaining:
            yield []
            return
        first = remaining[0]
        for k in range(1, len(remaining)):
            rest = remaining[1:k] + remaining[k + 1:]
            for tail in rec(rest):
                yield [(first, remaining[k])] + tail

    yield from rec(idx)


class CcrSpace:
    """R^n with SPD Gram matrix and invertible covariance operator K; S = K K*.

    The adjoint in S is taken with respect to the Gram inner product
    (K* = G^-1 K^T G), which reduces to the plain transpose for the identity
    Gram and is exactly what the quasi-invariance cocycle law requires.
    """

    def __init__(self, gram, k_op, cond_limit: float = 1e12):
        gram = np.asarray(gram, dtype=float)
        k_op = np.asarray(k_op, dtype=float)
        n = gram.shape[0]
        if gram.shape != (n, n) or k_op.shape != (n, n):
            raise ShapeMismatchError("gram and K must be square of the same size")
        if np.max(np.abs(gram - gram.T)) > 1e-12 * max(1.0, float(np.max(np.abs(gram)))):
            raise ValueError("gram matrix must be symmetric")
        lam = np.linalg.eigvalsh(gram)
        if lam[0] <= 0.0:
            raise ValueError(f"gram matrix must be positive definite (min eigenvalue {lam[0]:.3e})")
        if np.linalg.cond(k_op) > cond_limit:
            raise ValueError("operator K is numerically singular")
        self.n = n
        self.gram = gram
        self.k_op = k_op
        self.k_inv = np.linalg.inv(k_op)
        gram_inv = np.linalg.inv(gram)
        self.s_op = k_op @ gram_inv @ k_op.T @ gram
        self.covariance = self.k_inv.T @ gram @ self.k_inv
        self._chol = np.linalg.cholesky(gram)

    def inner(self, q, r) -> float:
        return float(np.asarray(q) @ self.gram @ np.asarray(r))

    def pair_value(self, q, r) -> float:
        """Two-point value <K^-1 q | K^-1 r>."""
        return float((self.k_inv @ q) @ self.gram @ (self.k_inv @ r))

    def covariance_form(self, q) -> float:
        """M_K(q) = <K^-1 q | K^-1 q>."""
        return self.pair_value(q, q)

    def gram_image(self, q) -> np.ndarray:
        """Dual coordinates of u_q, defined by <r, u_q> = <r | q>."""
        return self.gram @ np.asarray(q, dtype=float)

    def generating_function(self, q) -> float:
        return float(np.exp(-0.5 * self.covariance_form(q)))

    def orthonormal_modes(self) -> np.ndarray:
        """Columns form a Gram-orthonormal basis (inverse Cholesky transpose)."""
        return np.linalg.inv(self._chol).T

    def mode_coefficients(self, q) -> np.ndarray:
        """Expansion of q in the Gram-orthonormal mode basis."""
        return self._chol.T @ self._check_vector(q)

    def _check_vector(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise ShapeMismatchError(f"vector of shape {q.shape} does not match dimension {self.n}")
        return q


def wick_moment(space: CcrSpace, args: Sequence) -> float:
    """Gaussian moment <phi(q_1) ... phi(q_m)> by pair-partition enumeration.

    Odd m vanishes; even m sums the product of two-point values over all
    (m-1)!! pairings.
    """
    vecs = [space._check_vector(q) for q in args]
    m = len(vecs)
    if m % 2 == 1:
        return 0.0
    if m == 0:
        return 1.0
    pair = {}
    for i in range(m):
        for j in range(i + 1, m):
            pair[(i, j)] = space.pair_value(vecs[i], vecs[j])
    total = 0.0
    for partition in pair_partitions(m):
        prod = 1.0
        for ij in partition:
            prod *= pair[ij]
        total += prod
    return total


def moment_oracle(space: CcrSpace, args: Sequence, step: float = 0.25, levels: int = 5) -> float:
    """Moments from mixed central differences of the generating function.

    Independent of :func:`wick_moment`: evaluates
    i^-m d^m/dalpha_1..dalpha_m  Z(sum alpha_i q_i) at alpha = 0 on a
    2^m stencil with ``levels`` Richardson eliminations.  Arguments are
    normalized to unit K^-1-image (moments are multilinear) so the step is
    scale-free.  Limited to m <= 6; beyond that step noise dominates.
    """
    vecs = [space._check_vector(q) for q in args]
    m = len(vecs)
    if m > 6:
        raise NumericalError("moment_oracle supports at most 6 arguments")
    if m == 0:
        return 1.0
    if m % 2 == 1:
        return 0.0  # the symmetric stencil cancels identically on even Z
    images = [space.k_inv @ q for q in vecs]
    norms = [math.sqrt(float(w @ space.gram @ w)) for w in images]
    if any(s == 0.0 for s in norms):
        return 0.0
    unit = np.stack([w / s for w, s in zip(images, norms)])
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=m)))
    parity = np.prod(signs, axis=1)

    def stencil(h: float) -> float:
        # evaluate Z on the summed vector directly; no pair-value sharing with
        # the partition enumerator
        combos = (signs * h) @ unit
        exponent = -0.5 * np.einsum("ki,ij,kj->k", combos, space.gram, combos)
        terms = parity * np.expm1(exponent)
        return math.fsum(terms.tolist()) / (2.0 * h) ** m

    values = [stencil(step / 2 ** j) for j in range(levels)]
    for level in range(1, levels):
        factor = 4.0 ** level
        values = [
            (factor * values[i + 1] - values[i]) / (factor - 1.0)
            for i in range(len(values) - 1)
        ]
    return values[0] * (-1.0) ** (m // 2) * float(np.prod(norms))


def quasi_invariance_factor(space: CcrSpace, q, u) -> float:
    """Radon-Nikodym square root a_K(q, u) = exp(-M_K(Sq)/4 - <Sq, u>/2).

    Satisfies a(0, u) = 1 and the cocycle law
    a(q + q', u) = a(q, u) * a(q', u + u_q) with u_q the Gram image of q.
    """
    q = space._check_vector(q)
    u = space._check_vector(u)
    sq = space.s_op @ q
    return float(np.exp(-0.25 * space.covariance_form(sq) - 0.5 * float(sq @ u)))


def gaussian_density(space: CcrSpace, w) -> float:
    """Density of the Gaussian measure with Fourier transform exp(-M_K/2).

    Normalized against the Lebesgue measure on the dual coordinates, so it
    integrates to one.
    """
    w = space._check_vector(w)
    sigma = space.covariance
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0.0:
        raise NumericalError("covariance matrix is not positive definite")
    quad = float(w @ np.linalg.solve(sigma, w))
    return float(np.exp(-0.5 * (space.n * np.log(2.0 * np.pi) + logdet + quad)))


class FockTruncation:
    """Ladder matrices on occupation tuples with total occupation <= n_max.

    Creation entries that would leave the truncation are dropped, so the
    canonical commutator holds exactly on the protected subspace of total
    occupation <= n_max - 1 and the vacuum is annihilated exactly.
    """

    def __init__(self, space: CcrSpace, n_max: int, basis_limit: int = 5000):
        if n_max < 1:
            raise ValueError("n_max must be at least 1")
        self.space = space
        self.n_max = int(n_max)
        self.modes = space.orthonormal_modes()
        n = space.n
        states = []

        def grow(prefix, budget):
            if len(prefix) == n:
                states.append(tuple(prefix))
                return
            for k in range(budget + 1):
                grow(prefix + [k], budget - k)

        grow([], self.n_max)
        states.sort(key=lambda t: (sum(t), t))
        if len(states) > basis_limit:
            raise NumericalError(
                f"truncated basis of size {len(states)} exceeds limit {basis_limit}"
            )
        self.occupations = tuple(states)
        self.index = {t: i for i, t in enumerate(states)}
        self.dim = len(states)
        raise_mats = []
        for mode in range(n):
            m = np.zeros((self.dim, self.dim))
            for occ, col in self.index.items():
                if sum(occ) + 1 <= self.n_max:
                    lifted = list(occ)
                    lifted[mode] += 1
                    m[self.index[tuple(lifted)], col] = math.sqrt(occ[mode] + 1)
            raise_mats.append(m)
        self._raise = tuple(raise_mats)
        self._lower = tuple(m.T.copy() for m in raise_mats)

    def a_plus(self, q) -> np.ndarray:
        c = self.space.mode_coefficients(q)
        return sum(ck * m for ck, m in zip(c, self._raise))

    def a_minus(self, q) -> np.ndarray:
        c = self.space.mode_coefficients(q)
        return sum(ck * m for ck, m in zip(c, self._lower))

    def field(self, q) -> np.ndarray:
        """phi(q) = (a+(q) + a-(q)) / sqrt(2)."""
        return (self.a_plus(q) + self.a_minus(q)) / math.sqrt(2.0)

    def momentum(self, q) -> np.ndarray:
        """pi(q) = i (a+(q) - a-(q)) / sqrt(2)."""
        return 1j * (self.a_plus(q) - self.a_minus(q)) / math.sqrt(2.0)

    def number_operator(self) -> np.ndarray:
        return sum(r @ l for r, l in zip(self._raise, self._lower))

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.index[(0,) * self.space.n]] = 1.0
        return v

    def protected_indices(self) -> np.ndarray:
        """Basis indices with total occupation <= n_max - 1."""
        return np.array([i for t, i in self.index.items() if sum(t) <= self.n_max - 1])


def build_fock_operators(space: CcrSpace, n_max: int = 8) -> FockTruncation:
    """Truncated Fock realization of the ladder operators over ``space``."""
    return FockTruncation(space, n_max)


class VacuumShift:
    """Shift of the vacuum: a concrete vector in Q or a declared mode-family tail.

    A power tail sigma_k = c * k^-p models shifts by vectors outside the
    canonical image of Q; the shifted representation stays equivalent to the
    Fock one exactly when the shift is square-summable (p > 1/2).
    """

    def __init__(self, vector=None, tail_c: Optional[float] = None, tail_p: Optional[float] = None):
        if (vector is None) == (tail_c is None):
            raise ValueError("provide exactly one of a concrete vector or a tail model")
        self.vector = None if vector is None else np.asarray(vector, dtype=float)
        self.tail_c = tail_c
        self.tail_p = tail_p
        if tail_c is not None and not (tail_p is not None and tail_p > 0.0):
            raise ValueError("tail model requires an exponent p > 0")

    def pairing(self, space: CcrSpace, q) -> float:
        """<q, sigma>: Gram pairing for concrete shifts, mode pairing for tails."""
        q = space._check_vector(q)
        if self.vector is not None:
            if self.vector.shape != (space.n,):
                raise ShapeMismatchError("shift vector dimension mismatch")
            return float(q @ space.gram @ self.vector)
        coeffs = space.mode_coefficients(q)
        k = np.arange(1, space.n + 1, dtype=float)
        return float(np.sum(coeffs * self.tail_c * k ** (-self.tail_p)))

    def square_summable(self) -> bool:
        if self.vector is not None:
            return True
        return bool(2.0 * self.tail_p > 1.0)


def shifted_vacuum_means(space: CcrSpace, shift: VacuumShift, q) -> tuple:
    """Vacuum means (<a+(q)>, <a-(q)>) of the shifted ladder operators.

    Both equal the real pairing <q, sigma>; the zero shift reproduces the
    Fock means (0, 0).
    """
    value = shift.pairing(space, q)
    return (complex(value), complex(value))


@dataclass(frozen=True)
class ConstantEigenvalues:
    """S has constant spectrum s; Fock case is s = 2."""
    value: float


@dataclass(frozen=True)
class PowerTailEigenvalues:
    """s_k = 2 + amplitude * k^-exponent, tending to the Fock value 2."""
    amplitude: float
    exponent: float


@dataclass(frozen=True)
class FiniteEigenvalues:
    """Finitely many modes; all finite-dimensional Gaussian states are equivalent."""
    values: tuple


def gaussian_equivalence_verdict(model) -> SeriesVerdict:
    """Trace criterion sum_k |1 - s_k / 2| for equivalence with the Fock state.

    ``convergent`` means equivalent-to-Fock, ``divergent`` inequivalent.
    """
    if isinstance(model, FiniteEigenvalues):
        vals = np.asarray(model.values, dtype=float)
        partial = float(np.sum(np.abs(1.0 - vals / 2.0)))
        return SeriesVerdict(
            "convergent", partial, len(model.values),
            "finite-dimensional: finitely many terms, all Gaussian states equivalent",
        )
    window = 10_000
    k = np.arange(1, window + 1, dtype=float)
    if isinstance(model, ConstantEigenvalues):
        defect = abs(1.0 - model.value / 2.0)
        partial = defect * window
        if defect == 0.0:
            return SeriesVerdict(
                "convergent", 0.0, window, "spectrum identically 2: every term vanishes",
            )
        return SeriesVerdict(
            "divergent", partial, window,
            f"constant defect |1 - s/2| = {defect:g} > 0 diverges linearly",
        )
    if isinstance(model, PowerTailEigenvalues):
        partial = float(np.sum(np.abs(model.amplitude) / 2.0 * k ** (-model.exponent)))
        if model.amplitude == 0.0:
            return SeriesVerdict(
                "convergent", 0.0, window, "spectrum identically 2: every term vanishes",
            )
        return p_series_verdict(
            model.exponent, partial, window,
            f"trace criterion terms |1 - s_k/2| = {abs(model.amplitude) / 2:g} k^-{model.exponent:g}",
        )
    return SeriesVerdict("undecided", float("nan"), 0, "unmodeled eigenvalue sequence")
