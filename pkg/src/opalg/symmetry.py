"""Inner automorphisms acting on states: stationarity, implementers, orbits, flows.

Automorphisms of a finite direct sum of matrix blocks are realized as
conjugation by a unitary element; two automorphisms are the same exactly when
they agree on the canonical basis (the defining unitary is only fixed up to a
phase, which the group bookkeeping quotients away but records as a multiplier).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .algebra import AlgebraElement, State, dual_norm_distance
from .errors import OpalgError, ShapeMismatchError
from .gns import gns_construct

STATIONARY_TOL = 1e-10
ACTION_TOL = 1e-9


class InnerAutomorphism:
    """a -> U a U^-1 for a unitary element U of the algebra."""

    def __init__(self, unitary: AlgebraElement):
        if not unitary.is_unitary(1e-12):
            raise OpalgError("defining element is not unitary within 1e-12")
        self.unitary = unitary
        self.algebra = unitary.algebra
        self._action_matrix = None

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.algebra:
            raise ShapeMismatchError("element lives on a different algebra")
        return self.unitary * a * self.unitary.star

    def action_matrix(self) -> np.ndarray:
        """Matrix of the action on canonical coordinates (cached)."""
        if self._action_matrix is None:
            dim = self.algebra.dim
            cols = np.zeros((dim, dim), dtype=complex)
            for k in range(dim):
                cols[:, k] = self.algebra.coords(self.apply(self.algebra.basis_element(k)))
            self._action_matrix = cols
        return self._action_matrix

    def same_action(self, other: "InnerAutomorphism", tol: float = ACTION_TOL) -> bool:
        return bool(np.max(np.abs(self.action_matrix() - other.action_matrix())) <= tol)

    def compose(self, other: "InnerAutomorphism") -> "InnerAutomorphism":
        return InnerAutomorphism(self.unitary * other.unitary)

    def inverse(self) -> "InnerAutomorphism":
        return InnerAutomorphism(self.unitary.star)


class AutomorphismGroup:
    """Finite list of inner automorphisms, closed under composition and inverse.

    Closure is verified at the level of actions; the scalar mismatch between
    chosen unitary representatives is recorded in the multiplier table.
    """

    def __init__(self, elements: List[InnerAutomorphism]):
        if not elements:
            raise ValueError("group must be non-empty")
        algebra = elements[0].algebra
        if any(e.algebra != algebra for e in elements):
            raise ShapeMismatchError("all automorphisms must act on one algebra")
        self.algebra = algebra
        self.elements = list(elements)
        n = len(elements)
        self.table = np.full((n, n), -1, dtype=int)
        for i, gi in enumerate(elements):
            for j, gj in enumerate(elements):
                prod = gi.compose(gj)
                for k, gk in enumerate(elements):
                    if prod.same_action(gk):
                        self.table[i, j] = k
                        break
                else:
                    raise ValueError(f"closure fails: product of elements {i} and {j} not in list")
        identity = None
        for k, g in enumerate(elements):
            if np.max(np.abs(g.action_matrix() - np.eye(algebra.dim))) <= ACTION_TOL:
                identity = k
                break
        if identity is None:
            raise ValueError("group contains no identity automorphism")
        self.identity = identity
        for i in range(n):
            if not np.any(self.table[i] == identity):
                raise ValueError(f"element {i} has no inverse in the list")

    def __len__(self):
        return len(self.elements)

    def multiplier_table(self) -> np.ndarray:
        """Scalars k(g, g') with U_g U_g' = k(g, g') U_{gg'} for the chosen unitaries."""
        n = len(self.elements)
        out = np.zeros((n, n), dtype=complex)
        dims = sum(self.algebra.blocks)
        for i in range(n):
            for j in range(n):
                prod = self.elements[i].unitary * self.elements[j].unitary
                ref = self.elements[self.table[i, j]].unitary
                num = sum(np.trace(r.conj().T @ p) for r, p in zip(ref.mats, prod.mats))
                out[i, j] = num / dims
        return out


def pushforward_state(f: State, rho: InnerAutomorphism) -> State:
    """f_rho(a) = f(rho(a)): the density transforms as U* rho_f U blockwise."""
    if f.algebra != rho.algebra:
        raise ShapeMismatchError("state and automorphism live on different algebras")
    dens = [
        u.conj().T @ d @ u
        for d, u in zip(f.densities, rho.unitary.mats)
    ]
    return State(f.algebra, dens)


def stationarity_check(f: State, rho: InnerAutomorphism, tol: float = STATIONARY_TOL) -> bool:
    return dual_norm_distance(f, pushforward_state(f, rho)) <= tol


@dataclass
class ImplementerResult:
    unitary: Optional[np.ndarray]    # None when the defining map is not isometric
    isometry_defect: float
    intertwining_residual: Optional[float] = None


def unitary_implementer(f: State, rho: InnerAutomorphism,
                        tol: float = 1e-9) -> ImplementerResult:
    """Unitary on the GNS carrier with U pi(a) U^-1 = pi(rho(a)) and U theta = theta.

    The defining assignment pi(a) theta -> pi(rho(a)) theta is accepted only
    if it preserves the Gram quadratic form within ``tol``; otherwise the
    state is not stationary and no implementer exists.
    """
    rep = gns_construct(f.algebra, f)
    action = rho.action_matrix()
    t = rep.quotient_map
    # Gram preservation: R^H G R == G with G = T^H T
    gram = t.conj().T @ t
    defect = float(np.max(np.abs(action.conj().T @ gram @ action - gram)))
    scale = max(float(np.max(np.abs(gram))), 1.0)
    if defect > tol * scale:
        return ImplementerResult(unitary=None, isometry_defect=defect)
    w = t @ action @ rep.quotient_pinv
    residual = 0.0
    for k in range(f.algebra.dim):
        image = f.algebra.coords(rho.apply(f.algebra.basis_element(k)))
        target = np.zeros_like(rep.generator_matrices[0])
        for ck, mat in zip(image, rep.generator_matrices):
            target += ck * mat
        residual = max(residual, float(np.max(np.abs(
            w @ rep.generator_matrices[k] @ w.conj().T - target
        ))))
    return ImplementerResult(unitary=w, isometry_defect=defect, intertwining_residual=residual)


@dataclass
class OrbitReport:
    stabilizer_size: int
    orbit_size: int
    group_order: int
    orbit_states: list

    @property
    def coset_count(self) -> int:
        return self.group_order // self.stabilizer_size


def stabilizer_orbit(f: State, group: AutomorphismGroup,
                     distinct_tol: float = 1e-8) -> OrbitReport:
    """Stabilizer H = {g : f stationary}, orbit of pushforward states, |orbit| = |G|/|H|."""
    if f.algebra != group.algebra:
        raise ShapeMismatchError("state and group live on different algebras")
    stabilizer = 0
    orbit: list = []
    for g in group.elements:
        moved = pushforward_state(f, g)
        if dual_norm_distance(f, moved) <= STATIONARY_TOL:
            stabilizer += 1
        if all(dual_norm_distance(moved, seen) > distinct_tol for seen in orbit):
            orbit.append(moved)
    report = OrbitReport(
        stabilizer_size=stabilizer,
        orbit_size=len(orbit),
        group_order=len(group),
        orbit_states=orbit,
    )
    if report.orbit_size * report.stabilizer_size != report.group_order:
        raise OpalgError(
            f"orbit law violated: {report.orbit_size} * {report.stabilizer_size} "
            f"!= {report.group_order}"
        )
    return report


def one_parameter_flow(b: AlgebraElement, t: float, a: AlgebraElement) -> AlgebraElement:
    """G_t(a) = exp(-itb) a exp(itb) for Hermitian b, via blockwise eigendecomposition.

    The derivative at t = 0 is -i[b, a].
    """
    if not b.is_hermitian(1e-10):
        raise OpalgError("flow generator must be Hermitian")
    if a.algebra != b.algebra:
        raise ShapeMismatchError("flow generator and argument live on different algebras")
    out = []
    for bm, am in zip(b.mats, a.mats):
        lam, vec = np.linalg.eigh(bm)
        phases = np.exp(-1j * t * lam)
        u = (vec * phases[None, :]) @ vec.conj().T
        out.append(u @ am @ u.conj().T)
    return a.algebra.element(out)
