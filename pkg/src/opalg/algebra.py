"""Finite-dimensional *-algebras, their elements, and states.

An algebra is a direct sum of full complex matrix blocks M_{n_1} + ... + M_{n_k}
with the conjugate-transpose involution; a state is one positive-semidefinite
density per block with total trace one.  Every finite-dimensional C*-algebra
is of this form, which keeps all the representation-theoretic criteria used
elsewhere in the package decidable by dense linear algebra.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidStateError, ShapeMismatchError
from .linalg import hermitize, nuclear_norm

PSD_TOL = 1e-10


def _freeze(mat: np.ndarray) -> np.ndarray:
    mat = np.ascontiguousarray(mat)
    mat.setflags(write=False)
    return mat


class StarAlgebra:
    """Direct sum of full matrix blocks with entrywise conjugate-transpose involution."""

    def __init__(self, blocks):
        blocks = tuple(int(n) for n in blocks)
        if not blocks or any(n < 1 for n in blocks):
            raise ValueError(f"block dimensions must be positive integers, got {blocks}")
        self.blocks = blocks
        self._offsets = []
        off = 0
        for n in blocks:
            self._offsets.append(off)
            off += n * n
        self._dim = off
        self._labels = tuple(
            f"e{b}[{i},{j}]" for b, n in enumerate(blocks) for i in range(n) for j in range(n)
        )

    @property
    def dim(self) -> int:
        """Linear dimension, sum of squared block sizes."""
        return self._dim

    def __eq__(self, other):
        return isinstance(other, StarAlgebra) and other.blocks == self.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return "StarAlgebra(" + " + ".join(f"M{n}" for n in self.blocks) + ")"

    def element(self, mats) -> "AlgebraElement":
        mats = tuple(np.asarray(m, dtype=complex) for m in mats)
        if len(mats) != len(self.blocks):
            raise ShapeMismatchError(f"expected {len(self.blocks)} blocks, got {len(mats)}")
        for m, n in zip(mats, self.blocks):
            if m.shape != (n, n):
                raise ShapeMismatchError(f"block of shape {m.shape} does not match M{n}")
        return AlgebraElement(self, mats)

    def identity(self) -> "AlgebraElement":
        return self.element([np.eye(n, dtype=complex) for n in self.blocks])

    def zero(self) -> "AlgebraElement":
        return self.element([np.zeros((n, n), dtype=complex) for n in self.blocks])

    def basis_labels(self):
        return self._labels

    def basis_triples(self):
        """Canonical matrix-unit order: blocks, then row-major within a block."""
        for b, n in enumerate(self.blocks):
            for i in range(n):
                for j in range(n):
                    yield b, i, j

    def basis_element(self, index: int) -> "AlgebraElement":
        c = np.zeros(self._dim, dtype=complex)
        c[index] = 1.0
        return self.from_coords(c)

    def coords(self, a: "AlgebraElement") -> np.ndarray:
        return np.concatenate([m.reshape(-1) for m in a.mats])

    def from_coords(self, c) -> "AlgebraElement":
        c = np.asarray(c, dtype=complex)
        mats = []
        for n, off in zip(self.blocks, self._offsets):
            mats.append(c[off:off + n * n].reshape(n, n))
        return self.element(mats)

    def left_mult_matrix(self, a: "AlgebraElement") -> np.ndarray:
        """Matrix of x -> a x on canonical coordinates (block-diagonal kron)."""
        out = np.zeros((self._dim, self._dim), dtype=complex)
        for m, n, off in zip(a.mats, self.blocks, self._offsets):
            # row-major vec(AX) = (A kron I) vec(X)
            out[off:off + n * n, off:off + n * n] = np.kron(m, np.eye(n))
        return out

    def random_element(self, rng, scale: float = 1.0) -> "AlgebraElement":
        mats = [
            scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            for n in self.blocks
        ]
        return self.element(mats)

    def random_hermitian(self, rng, scale: float = 1.0) -> "AlgebraElement":
        a = self.random_element(rng, scale)
        return self.element([hermitize(m) for m in a.mats])


class AlgebraElement:
    """One matrix per block of the parent :class:`StarAlgebra`."""

    __slots__ = ("algebra", "mats")

    def __init__(self, algebra: StarAlgebra, mats):
        self.algebra = algebra
        self.mats = tuple(_freeze(m) for m in mats)

    def _check(self, other: "AlgebraElement"):
        if other.algebra != self.algebra:
            raise ShapeMismatchError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.mats, other.mats)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.mats, other.mats)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.mats])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.mats, other.mats)])
        return AlgebraElement(self.algebra, [other * a for a in self.mats])

    def __rmul__(self, scalar):
        return AlgebraElement(self.algebra, [scalar * a for a in self.mats])

    @property
    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a.conj().T for a in self.mats])

    def block(self, b: int) -> np.ndarray:
        return self.mats[b]

    def norm(self) -> float:
        return operator_norm(self)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(np.max(np.abs(m - m.conj().T)) <= tol * max(1.0, self.norm()) for m in self.mats)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return all(
            np.max(np.abs(m.conj().T @ m - np.eye(n))) <= tol * max(1.0, n)
            for m, n in zip(self.mats, self.algebra.blocks)
        )

    def __repr__(self):
        return f"AlgebraElement({self.algebra!r})"


def operator_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(
        float(np.linalg.norm(m, 2)) if m.size else 0.0
        for m in a.mats
    )


class State:
    """Normalized positive functional, stored as one PSD density per block.

    Eigenvalues in ``[-PSD_TOL * trace_scale, 0)`` are treated as numerical
    zeros of the state cone; anything more negative raises
    :class:`InvalidStateError` unless ``validate=False``.
    """

    def __init__(self, algebra: StarAlgebra, densities, validate: bool = True, tol: float = PSD_TOL):
        self.algebra = algebra
        densities = tuple(np.asarray(d, dtype=complex) for d in densities)
        if len(densities) != len(algebra.blocks):
            raise ShapeMismatchError("one density per block required")
        for d, n in zip(densities, algebra.blocks):
            if d.shape != (n, n):
                raise ShapeMismatchError(f"density of shape {d.shape} does not match M{n}")
        if validate:
            densities = self._validated(densities, tol)
        self.densities = tuple(_freeze(d) for d in densities)

    @staticmethod
    def _validated(densities, tol):
        scale = sum(abs(np.trace(d)) for d in densities)
        if scale <= 0.0:
            raise InvalidStateError("all densities vanish")
        clean = []
        for d in densities:
            herm_defect = np.max(np.abs(d - d.conj().T)) if d.size else 0.0
            if herm_defect > 1e-8 * max(scale, 1.0):
                raise InvalidStateError(f"density is not Hermitian (defect {herm_defect:.3e})")
            h = hermitize(d)
            lam, vec = np.linalg.eigh(h)
            if lam.size and lam[0] < -tol * max(scale, 1.0):
                raise InvalidStateError(f"density eigenvalue {lam[0]:.3e} below -{tol:.0e} * scale")
            lam = np.clip(lam, 0.0, None)
            clean.append((vec * lam[None, :]) @ vec.conj().T)
        total = sum(float(np.trace(d).real) for d in clean)
        if abs(total - 1.0) > 1e-8:
            raise InvalidStateError(f"total trace {total!r} != 1")
        return [d / total for d in clean]

    @classmethod
    def pure(cls, algebra: StarAlgebra, block: int, vector) -> "State":
        """Rank-one state |v><v| supported on a single block."""
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        dens = [np.zeros((n, n), dtype=complex) for n in algebra.blocks]
        dens[block] = np.outer(v, v.conj())
        return cls(algebra, dens)

    @classmethod
    def tracial(cls, algebra: StarAlgebra) -> "State":
        total = sum(algebra.blocks)
        return cls(algebra, [np.eye(n, dtype=complex) / total for n in algebra.blocks])

    def __call__(self, a: AlgebraElement) -> complex:
        return evaluate_state(self, a)

    def block_traces(self):
        return tuple(float(np.trace(d).real) for d in self.densities)

    def __repr__(self):
        return f"State(on {self.algebra!r}, block traces {self.block_traces()})"


def evaluate_state(f: State, a: AlgebraElement) -> complex:
    """f(a) = sum_b trace(rho_b a_b)."""
    if a.algebra != f.algebra:
        raise ShapeMismatchError("state and element live on different algebras")
    return complex(sum(np.trace(d @ m) for d, m in zip(f.densities, a.mats)))


def dual_norm_distance(f: State, g: State) -> float:
    """Dual norm of f - g, computed as the blockwise trace norm of the density difference.

    On a finite-dimensional C*-algebra this equals the sup definition
    sup_{|a|=1} |f(a) - g(a)|; states always land in [0, 2].
    """
    if f.algebra != g.algebra:
        raise ShapeMismatchError("states live on different algebras")
    return float(sum(nuclear_norm(a - b) for a, b in zip(f.densities, g.densities)))


def compose_algebras(lhs: StarAlgebra, rhs: StarAlgebra, mode: str = "direct_sum") -> StarAlgebra:
    """Combine algebras; ``direct_sum`` concatenates blocks, ``tensor`` needs single blocks."""
    if mode == "direct_sum":
        return StarAlgebra(lhs.blocks + rhs.blocks)
    if mode == "tensor":
        if len(lhs.blocks) != 1 or len(rhs.blocks) != 1:
            raise ShapeMismatchError(
                "tensor composition supports single-block factors only; "
                "decompose multi-block factors first"
            )
        return StarAlgebra((lhs.blocks[0] * rhs.blocks[0],))
    raise ValueError(f"unknown composition mode {mode!r}")


def tensor_elements(target: StarAlgebra, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Kron of two single-block elements into their tensor algebra."""
    return target.element([np.kron(a.mats[0], b.mats[0])])
