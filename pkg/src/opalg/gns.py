"""GNS construction and the equivalence / purity criteria it supports.

The carrier of the cyclic representation of a state f is the quotient of the
algebra by the null space of the Gram matrix G[b, a] = f(b* a) taken over the
canonical matrix-unit basis; left multiplication pushed to orthonormal
coordinates of that quotient gives the representation, and the class of the
identity is the cyclic vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import AlgebraElement, StarAlgebra, State, evaluate_state
from .errors import NumericalError, OpalgError, ShapeMismatchError
from .linalg import (
    best_invertible,
    commutant,
    fix_global_phase,
    gram_quotient,
    intertwiner_space,
    orthonormal_completion,
    polar_unitary,
)

GRAM_REL_CUT = 1e-12
KERNEL_TOL = 1e-9


@dataclass
class GnsRep:
    """Cyclic representation data produced by :func:`gns_construct`."""

    algebra: StarAlgebra
    quotient_map: np.ndarray        # (d, D): canonical coordinates -> carrier
    quotient_pinv: np.ndarray       # (D, d)
    generator_matrices: tuple       # pi(e_k) for each canonical matrix unit
    cyclic_vector: np.ndarray
    gram_rank: int
    kernel_labels: tuple            # labels of matrix units with pi(e) = 0
    vanished_blocks: tuple          # block indices entirely inside the kernel

    @property
    def carrier_dim(self) -> int:
        return int(self.quotient_map.shape[0])

    def represent(self, a: AlgebraElement) -> np.ndarray:
        if a.algebra != self.algebra:
            raise ShapeMismatchError("element does not belong to the represented algebra")
        c = self.algebra.coords(a)
        out = np.zeros((self.carrier_dim, self.carrier_dim), dtype=complex)
        for ck, mat in zip(c, self.generator_matrices):
            if ck != 0.0:
                out += ck * mat
        return out

    def vector_state_values(self) -> np.ndarray:
        """<pi(e_k) theta | theta> over the canonical basis."""
        th = self.cyclic_vector
        return np.array([np.vdot(th, m @ th) for m in self.generator_matrices])

    def reconstructed_state(self) -> State:
        """Rebuild the state from (pi, theta); equals the input within round-off."""
        vals = self.vector_state_values()
        dens = []
        k = 0
        for n in self.algebra.blocks:
            rho = np.zeros((n, n), dtype=complex)
            for i in range(n):
                for j in range(n):
                    # f(e_ij) = trace(rho e_ij) = rho[j, i]
                    rho[j, i] = vals[k]
                    k += 1
            dens.append(rho)
        return State(self.algebra, dens)


def gns_construct(algebra: StarAlgebra, f: State) -> GnsRep:
    """Run the GNS construction for a state on a finite-dimensional *-algebra.

    Raises :class:`InvalidStateError` via the Gram quotient when the Gram
    matrix fails to be PSD beyond tolerance.
    """
    if f.algebra != algebra:
        raise ShapeMismatchError("state does not live on the given algebra")
    dim = algebra.dim
    # Gram[b_idx, a_idx] = f(e_b^* e_a); for matrix units f(e_ji e_kl) = delta_ik rho[l, j]
    gram = np.zeros((dim, dim), dtype=complex)
    triples = list(algebra.basis_triples())
    for row, (b1, i1, j1) in enumerate(triples):
        for col, (b2, i2, j2) in enumerate(triples):
            if b1 == b2 and i1 == i2:
                gram[row, col] = f.densities[b1][j2, j1]
    t, t_pinv, rank = gram_quotient(gram, GRAM_REL_CUT)
    if rank == 0:
        raise NumericalError("state Gram has rank zero")
    gens = []
    for idx in range(dim):
        left = algebra.left_mult_matrix(algebra.basis_element(idx))
        gens.append(np.ascontiguousarray(t @ left @ t_pinv))
    theta = t @ algebra.coords(algebra.identity())
    scale = max(float(np.max(np.abs(m))) for m in gens)
    kernel = tuple(
        label
        for label, m in zip(algebra.basis_labels(), gens)
        if np.max(np.abs(m)) <= KERNEL_TOL * max(scale, 1.0)
    )
    vanished = tuple(
        b for b, n in enumerate(algebra.blocks)
        if float(np.trace(f.densities[b]).real) <= KERNEL_TOL
    )
    return GnsRep(
        algebra=algebra,
        quotient_map=t,
        quotient_pinv=t_pinv,
        generator_matrices=tuple(gens),
        cyclic_vector=theta,
        gram_rank=rank,
        kernel_labels=kernel,
        vanished_blocks=vanished,
    )


def commutant_basis(rep: GnsRep) -> list:
    """Basis of operators commuting with every generator; contains the identity."""
    return commutant(rep.generator_matrices)


def purity_check(algebra: StarAlgebra, f: State) -> str:
    """'pure' iff the GNS commutant is one-dimensional, else 'mixed'."""
    rep = gns_construct(algebra, f)
    return "pure" if len(commutant_basis(rep)) == 1 else "mixed"


@dataclass
class EquivalenceReport:
    """Outcome of equivalence_check, with certificates where they exist."""

    verdict: str                                   # equal | equivalent | inequivalent | undecided
    kernel_first: tuple
    kernel_second: tuple
    intertwiner: Optional[np.ndarray] = None
    intertwiner_residual: Optional[float] = None
    transition: Optional[tuple] = None             # (b, b') with f'(a)=f(b*ab), f(a)=f'(b'*ab')
    unitary: Optional[AlgebraElement] = None
    note: str = ""
    carrier_dims: tuple = field(default=())

    @property
    def equivalent(self) -> bool:
        return self.verdict in ("equal", "equivalent")


def _intertwiner_residual(gamma, first, second) -> float:
    worst = 0.0
    gamma_inv = np.linalg.inv(gamma)
    for p, q in zip(first, second):
        worst = max(worst, float(np.max(np.abs(gamma @ p @ gamma_inv - q))))
    return worst


def equivalence_check(algebra: StarAlgebra, f: State, g: State) -> EquivalenceReport:
    """Decide whether two states generate equivalent cyclic representations.

    Kernels (vanishing blocks) are compared first; equal kernels are then
    settled constructively by solving the joint intertwiner system over all
    generators and testing invertibility of the best-conditioned solution.
    """
    rep_f = gns_construct(algebra, f)
    rep_g = gns_construct(algebra, g)
    kernels = (rep_f.vanished_blocks, rep_g.vanished_blocks)
    dims = (rep_f.carrier_dim, rep_g.carrier_dim)

    if rep_f.vanished_blocks != rep_g.vanished_blocks:
        return EquivalenceReport(
            verdict="inequivalent",
            kernel_first=kernels[0],
            kernel_second=kernels[1],
            note="representation kernels differ",
            carrier_dims=dims,
        )
    if rep_f.carrier_dim != rep_g.carrier_dim:
        return EquivalenceReport(
            verdict="inequivalent",
            kernel_first=kernels[0],
            kernel_second=kernels[1],
            note="equal kernels but different carrier dimensions "
                 f"{dims[0]} != {dims[1]} (different multiplicities)",
            carrier_dims=dims,
        )

    equal_states = all(
        np.max(np.abs(a - b)) <= 1e-12 for a, b in zip(f.densities, g.densities)
    )
    if equal_states:
        gamma = np.eye(rep_f.carrier_dim, dtype=complex)
        report = EquivalenceReport(
            verdict="equal",
            kernel_first=kernels[0],
            kernel_second=kernels[1],
            intertwiner=gamma,
            intertwiner_residual=_intertwiner_residual(
                gamma, rep_f.generator_matrices, rep_g.generator_matrices
            ),
            carrier_dims=dims,
        )
        report.transition = (algebra.identity(), algebra.identity())
        _attach_unitary(report, algebra, f, g)
        return report

    space = intertwiner_space(rep_f.generator_matrices, rep_g.generator_matrices)
    gamma, ratio = best_invertible(space)
    if gamma is None:
        return EquivalenceReport(
            verdict="inequivalent",
            kernel_first=kernels[0],
            kernel_second=kernels[1],
            note=f"no invertible intertwiner (best relative sigma_min {ratio:.2e})",
            carrier_dims=dims,
        )
    report = EquivalenceReport(
        verdict="equivalent",
        kernel_first=kernels[0],
        kernel_second=kernels[1],
        intertwiner=gamma,
        intertwiner_residual=_intertwiner_residual(
            gamma, rep_f.generator_matrices, rep_g.generator_matrices
        ),
        carrier_dims=dims,
    )
    report.transition = _transition_from_intertwiner(algebra, f, g, rep_f, rep_g, gamma)
    _attach_unitary(report, algebra, f, g)
    return report


def _transition_from_intertwiner(algebra, f, g, rep_f, rep_g, gamma):
    """Solve pi_f(b) theta_f = gamma^-1 theta_g (gamma unitarized) and verify."""
    u = polar_unitary(gamma)
    b = algebra.from_coords(rep_f.quotient_pinv @ (u.conj().T @ rep_g.cyclic_vector))
    b_back = algebra.from_coords(rep_g.quotient_pinv @ (u @ rep_f.cyclic_vector))
    worst = 0.0
    for idx in range(algebra.dim):
        e = algebra.basis_element(idx)
        worst = max(worst, abs(evaluate_state(g, e) - evaluate_state(f, b.star * e * b)))
        worst = max(worst, abs(evaluate_state(f, e) - evaluate_state(g, b_back.star * e * b_back)))
    if worst > 1e-8:
        raise NumericalError(f"transition elements failed verification ({worst:.3e})")
    return (b, b_back)


def _attach_unitary(report, algebra, f, g):
    try:
        report.unitary = pure_unitary_intertwiner(algebra, f, g)
    except OpalgError:
        report.unitary = None


def transition_elements(algebra: StarAlgebra, f: State, g: State):
    """Elements (b, b') with f'(a) = f(b*ab) and f(a) = f'(b'*ab'), or None."""
    report = equivalence_check(algebra, f, g)
    return report.transition if report.equivalent else None


def pure_unitary_intertwiner(algebra: StarAlgebra, f: State, g: State):
    """Unitary U in A with g(a) = f(U* a U) for equivalent pure states.

    Raises on mixed input; returns None when the pure states are inequivalent.
    The U(1) phase family is pinned by making the first nonzero column entry
    real positive.
    """
    ranks_f = _rank_pattern(f)
    ranks_g = _rank_pattern(g)
    if not (_is_pure_pattern(ranks_f) and _is_pure_pattern(ranks_g)):
        raise OpalgError("pure_unitary_intertwiner requires pure states")
    block_f = ranks_f.index(1)
    block_g = ranks_g.index(1)
    if block_f != block_g:
        return None  # different kernels: inequivalent
    n = algebra.blocks[block_f]
    vec_f = _support_vector(f.densities[block_f])
    vec_g = _support_vector(g.densities[block_g])
    basis_f = orthonormal_completion(vec_f[:, None])
    basis_g = orthonormal_completion(vec_g[:, None])
    u_block = fix_global_phase(basis_g @ basis_f.conj().T)
    mats = [np.eye(m, dtype=complex) for m in algebra.blocks]
    mats[block_f] = u_block
    u = algebra.element(mats)
    worst = 0.0
    for idx in range(algebra.dim):
        e = algebra.basis_element(idx)
        worst = max(worst, abs(evaluate_state(g, e) - evaluate_state(f, u.star * e * u)))
    if worst > 1e-8:
        raise NumericalError(f"unitary intertwiner failed verification ({worst:.3e})")
    return u


def _rank_pattern(f: State, tol: float = 1e-9):
    ranks = []
    for d in f.densities:
        lam = np.linalg.eigvalsh(d)
        ranks.append(int(np.sum(lam > tol * max(float(lam[-1]), 1e-300))))
    return ranks


def _is_pure_pattern(ranks) -> bool:
    return sorted(ranks)[-1] == 1 and sum(ranks) == 1


def _support_vector(density: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(density)
    v = vec[:, -1]
    idx = int(np.argmax(np.abs(v)))
    return v * (abs(v[idx]) / v[idx])


def summed_generator_matrices(reps) -> list:
    """Block-diagonal generators of the Hilbert-sum representation."""
    dims = [r.carrier_dim for r in reps]
    total = sum(dims)
    out = []
    for k in range(reps[0].algebra.dim):
        m = np.zeros((total, total), dtype=complex)
        off = 0
        for r, d in zip(reps, dims):
            m[off:off + d, off:off + d] = r.generator_matrices[k]
            off += d
        out.append(m)
    return out


def superselection_operator(reps, weights) -> np.ndarray:
    """Block-scalar operator r_k * I on the k-th summand of the Hilbert sum.

    Commutes with the summed representation and multiplies each embedded
    cyclic vector by its weight, so distinct weights label the sectors.
    """
    reps = list(reps)
    weights = [float(w) for w in weights]
    if len(reps) != len(weights):
        raise ShapeMismatchError("one weight per representation required")
    if any(r.algebra != reps[0].algebra for r in reps):
        raise ShapeMismatchError("summands must represent the same algebra")
    total = sum(r.carrier_dim for r in reps)
    t = np.zeros((total, total), dtype=complex)
    off = 0
    for r, w in zip(reps, weights):
        d = r.carrier_dim
        t[off:off + d, off:off + d] = w * np.eye(d)
        off += d
    return t
