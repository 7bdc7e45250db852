"""Group algebras of finite groups and GNS representations from positive-definite functions.

Counting measure plays the Haar role, the modular function is identically
one, and the group-algebra involution is f*(g) = conj(f(g^-1)).  Functions on
a group of order n are plain complex arrays of length n in element order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, ShapeMismatchError
from .linalg import gram_quotient

PSD_TOL = 1e-10


class FiniteGroup:
    """Multiplication table, identity, and inverses; laws verified on build.

    Associativity is checked exhaustively for order <= 24 and on random
    triples above that.
    """

    def __init__(self, table, names=None, check: bool = True):
        table = np.asarray(table, dtype=int)
        n = table.shape[0]
        if table.shape != (n, n) or np.any(table < 0) or np.any(table >= n):
            raise ValueError("multiplication table must be n x n with entries in [0, n)")
        self.table = table
        self.order = n
        self.names = tuple(names) if names is not None else tuple(str(k) for k in range(n))
        identity = None
        for e in range(n):
            if np.array_equal(table[e], np.arange(n)) and np.array_equal(table[:, e], np.arange(n)):
                identity = e
                break
        if identity is None:
            raise ValueError("table has no two-sided identity")
        self.identity = identity
        inv = np.full(n, -1, dtype=int)
        for g in range(n):
            hits = np.where(table[g] == identity)[0]
            if hits.size != 1 or table[hits[0], g] != identity:
                raise ValueError(f"element {g} has no two-sided inverse")
            inv[g] = hits[0]
        self.inverse = inv
        if check:
            self._check_associativity()

    def _check_associativity(self):
        n = self.order
        if n <= 24:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = np.random.default_rng(0)
            triples = (tuple(rng.integers(0, n, size=3)) for _ in range(2000))
        for a, b, c in triples:
            if self.table[self.table[a, b], c] != self.table[a, self.table[b, c]]:
                raise ValueError(f"associativity fails on ({a}, {b}, {c})")

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, names=[str(k) for k in range(n)])


def symmetric_group(n: int) -> FiniteGroup:
    """S_n on {0..n-1}; elements sorted lexicographically, composition left-to-right."""
    perms = sorted(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    order = len(perms)
    table = np.zeros((order, order), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            composed = tuple(p[q[k]] for k in range(n))
            table[i, j] = index[composed]
    return FiniteGroup(table, names=[repr(p) for p in perms])


def _as_function(group: FiniteGroup, values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape != (group.order,):
        raise ShapeMismatchError(f"function must have one value per group element ({group.order})")
    return values


def delta(group: FiniteGroup, g: int) -> np.ndarray:
    out = np.zeros(group.order, dtype=complex)
    out[g] = 1.0
    return out


def convolve(group: FiniteGroup, f1, f2) -> np.ndarray:
    """(f1 * f2)(g) = sum_q f1(q) f2(q^-1 g); delta at the identity is the unit."""
    f1 = _as_function(group, f1)
    f2 = _as_function(group, f2)
    out = np.zeros(group.order, dtype=complex)
    for g in range(group.order):
        out[g] = np.sum(f1 * f2[group.table[group.inverse, g]])
    return out


def involution(group: FiniteGroup, f) -> np.ndarray:
    """f*(g) = conj(f(g^-1)); the modular function is 1 on a finite group."""
    f = _as_function(group, f)
    return np.conj(f[group.inverse])


def pd_kernel(group: FiniteGroup, psi) -> np.ndarray:
    """Matrix K[i, j] = psi(g_j^-1 g_i) whose positivity defines positive-definiteness."""
    psi = _as_function(group, psi)
    return psi[group.table[group.inverse]].T


def is_positive_definite(group: FiniteGroup, psi, tol: float = PSD_TOL) -> bool:
    k = pd_kernel(group, psi)
    if np.max(np.abs(k - k.conj().T)) > tol * max(1.0, float(np.max(np.abs(k)))):
        return False
    lam = np.linalg.eigvalsh(0.5 * (k + k.conj().T))
    return bool(lam[0] >= -tol * max(float(lam[-1]), 1.0))


@dataclass
class GroupRep:
    """Unitary representation with cyclic vector from the GNS quotient."""

    group: FiniteGroup
    matrices: tuple          # pi(g) per element
    cyclic_vector: np.ndarray
    gram_rank: int

    @property
    def carrier_dim(self) -> int:
        return int(self.cyclic_vector.shape[0])

    def reconstruction(self) -> np.ndarray:
        """<pi(g) theta | theta> per element; equals psi for the defining function."""
        th = self.cyclic_vector
        return np.array([np.vdot(th, m @ th) for m in self.matrices])


def gns_from_group_function(group: FiniteGroup, psi) -> GroupRep:
    """GNS representation of the group defined by a positive-definite function.

    The carrier is the quotient of the group-indexed space by the null space
    of the kernel psi(g_j^-1 g_i); left translation pushed to the quotient is
    unitary and reproduces psi as the vector form at the cyclic vector.
    """
    psi = _as_function(group, psi)
    if not is_positive_definite(group, psi):
        raise InvalidStateError("function is not positive-definite within tolerance")
    # pairing <delta_a | delta_b> = psi(b^-1 a); as a Gram with the starred
    # slot on rows this is the transpose of the positive-definiteness kernel
    gram = pd_kernel(group, psi).T
    t, t_pinv, rank = gram_quotient(gram)
    mats = []
    n = group.order
    for g in range(n):
        perm = np.zeros((n, n), dtype=complex)
        perm[group.table[g, np.arange(n)], np.arange(n)] = 1.0
        mats.append(np.ascontiguousarray(t @ perm @ t_pinv))
    theta = t @ delta(group, group.identity)
    return GroupRep(group=group, matrices=tuple(mats), cyclic_vector=theta, gram_rank=rank)


def left_regular_representation(group: FiniteGroup) -> GroupRep:
    """Left-regular representation built directly from (Pi(g) f)(q) = f(g^-1 q)."""
    n = group.order
    mats = []
    for g in range(n):
        m = np.zeros((n, n), dtype=complex)
        for q in range(n):
            m[q, group.table[group.inverse[g], q]] = 1.0
        mats.append(m)
    theta = delta(group, group.identity)
    return GroupRep(group=group, matrices=tuple(mats), cyclic_vector=theta, gram_rank=n)


def group_algebra_action(rep: GroupRep, f) -> np.ndarray:
    """pi^L(f) = sum_g f(g) pi(g); convolution becomes the matrix product."""
    f = _as_function(rep.group, f)
    out = np.zeros((rep.carrier_dim, rep.carrier_dim), dtype=complex)
    for coeff, m in zip(f, rep.matrices):
        out += coeff * m
    return out


@dataclass(frozen=True)
class OrthogonalityReport:
    inner_sum: complex       # sum_g psi'(g) conj(psi(g))
    convolution_max: float   # max_g |(psi * psi')(g)|


def orthogonality_check(group: FiniteGroup, psi, psi2) -> OrthogonalityReport:
    """Both quantities vanish for inequivalent irreducible characters."""
    psi = _as_function(group, psi)
    psi2 = _as_function(group, psi2)
    for fn in (psi, psi2):
        if not is_positive_definite(group, fn):
            raise InvalidStateError("orthogonality_check requires positive-definite inputs")
    inner = complex(np.sum(psi2 * np.conj(psi)))
    conv = convolve(group, psi, psi2)
    return OrthogonalityReport(inner_sum=inner, convolution_max=float(np.max(np.abs(conv))))


def irreducible_characters(group: FiniteGroup):
    """Characters of the built-in groups (cyclic of any order, S_3)."""
    n = group.order
    idx = np.arange(n)
    cyclic = cyclic_group(n)
    if np.array_equal(group.table, cyclic.table):
        return [np.exp(2j * np.pi * k * idx / n) for k in range(n)]
    s3 = symmetric_group(3)
    if n == 6 and np.array_equal(group.table, s3.table):
        perms = sorted(itertools.permutations(range(3)))
        def sign(p):
            s = 1
            for i in range(3):
                for j in range(i + 1, 3):
                    if p[i] > p[j]:
                        s = -s
            return s
        def fixed(p):
            return sum(1 for i in range(3) if p[i] == i)
        trivial = np.ones(6, dtype=complex)
        alternating = np.array([sign(p) for p in perms], dtype=complex)
        standard = np.array([fixed(p) - 1 for p in perms], dtype=complex)
        return [trivial, alternating, standard]
    raise ValueError("irreducible characters are built in only for Z_n and S_3 tables")
