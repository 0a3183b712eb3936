"""Dense operators on qubit registers and the spectral spread p(H).

Wire convention: wire 0 is the leftmost tensor factor and the least
significant bit of a basis index, so ``|d0 d1 ... d(n-1)>`` has index
``sum(d_l * 2**l)``.  Consequently ``tensor_product(A, B)`` (A on the lower
wires) is ``np.kron(B, A)`` as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


class OperatorError(ValueError):
    """Raised when an operator violates the contract of an operation."""


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable square complex matrix of power-of-two dimension."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise OperatorError(f"operator must be a square matrix, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise OperatorError(f"operator dimension must be a power of 2, got {dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def _known(cls, matrix, hermitian=None, unitary=None) -> "Operator":
        # skip the O(dim^3) unitarity test when the flag follows from construction
        op = cls(matrix)
        if hermitian:
            op.__dict__["is_hermitian"] = True
        if unitary:
            op.__dict__["is_unitary"] = True
        return op

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_wires(self) -> int:
        return self.dim.bit_length() - 1

    @cached_property
    def is_hermitian(self) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= HERMITIAN_TOL)

    @cached_property
    def is_unitary(self) -> bool:
        gram = self.matrix.conj().T @ self.matrix
        return bool(np.max(np.abs(gram - np.eye(self.dim)), initial=0.0) <= UNITARY_TOL)

    @cached_property
    def eigensystem(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Block-wise Hermitian eigendecomposition.

        The matrix is split into the connected components of its sparsity
        graph and each block is diagonalised separately; every block is a
        ``(indices, eigenvalues, eigenvectors)`` triple.
        """
        if not self.is_hermitian:
            raise OperatorError("eigendecomposition requires a Hermitian operator")
        return _block_eigh(self.matrix)

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([w for _, w, _ in self.eigensystem]))

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix)

    def allclose(self, other: "Operator", atol: float = HERMITIAN_TOL) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.matrix - other.matrix)) <= atol)

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim})"


def _block_eigh(matrix: np.ndarray):
    dim = matrix.shape[0]
    if dim <= 8:
        w, v = np.linalg.eigh(matrix)
        return [(np.arange(dim), w, v)]
    n_blocks, labels = connected_components(csr_matrix(np.abs(matrix) > 0), directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_blocks + 1))
    blocks = []
    for b in range(n_blocks):
        idx = order[bounds[b]:bounds[b + 1]]
        w, v = np.linalg.eigh(matrix[np.ix_(idx, idx)])
        blocks.append((idx, w, v))
    return blocks


def identity(n_wires: int) -> Operator:
    return Operator._known(np.eye(2**n_wires), hermitian=True, unitary=True)


SIGMA_X = Operator._known([[0, 1], [1, 0]], hermitian=True, unitary=True)
SIGMA_Z = Operator._known([[1, 0], [0, -1]], hermitian=True, unitary=True)


def permutation_operator(images: Sequence[int]) -> Operator:
    """Operator sending basis state ``|j>`` to ``|images[j]>``."""
    dim = len(images)
    if sorted(images) != list(range(dim)):
        raise OperatorError("images do not form a permutation")
    m = np.zeros((dim, dim))
    m[list(images), np.arange(dim)] = 1.0
    involution = all(images[images[j]] == j for j in range(dim))
    return Operator._known(m, hermitian=involution, unitary=True)


@dataclass(frozen=True)
class SpectralSpread:
    h_max: float
    h_min: float

    @property
    def p_value(self) -> float:
        return self.h_max - self.h_min


def spectral_spread(op: Operator) -> SpectralSpread:
    """Largest minus smallest eigenvalue of a Hermitian operator."""
    if not op.is_hermitian:
        raise OperatorError("spectral spread is defined for Hermitian operators only")
    h_max = max(float(w[-1]) for _, w, _ in op.eigensystem)
    h_min = min(float(w[0]) for _, w, _ in op.eigensystem)
    return SpectralSpread(h_max, h_min)


def tensor_product(a: Operator, b: Operator) -> Operator:
    """``a ⊗ b`` with ``a`` on the lower-order wires."""
    return Operator._known(
        np.kron(b.matrix, a.matrix),
        hermitian=a.is_hermitian and b.is_hermitian,
        unitary=a.is_unitary and b.is_unitary,
    )


def tensor_all(ops: Iterable[Operator]) -> Operator:
    ops = list(ops)
    if not ops:
        return Operator([[1.0]])
    out = ops[0]
    for op in ops[1:]:
        out = tensor_product(out, op)
    return out


def _wire_permutation(wires: Sequence[int], n_wires: int) -> np.ndarray:
    """Full basis index for each (rest, local) block position.

    Position ``r * 2**k + l`` maps to the basis state whose bits on ``wires``
    spell ``l`` (``wires[0]`` lowest) and whose remaining bits spell ``r``.
    """
    k = len(wires)
    rest = [w for w in range(n_wires) if w not in set(wires)]
    pos = np.arange(2**n_wires)
    local, other = pos & ((1 << k) - 1), pos >> k
    full = np.zeros_like(pos)
    for j, w in enumerate(wires):
        full |= ((local >> j) & 1) << w
    for j, w in enumerate(rest):
        full |= ((other >> j) & 1) << w
    return full


def embed_on_wires(op: Operator, wires: Sequence[int], n_wires: int) -> Operator:
    """Act with ``op`` on ``wires`` (in local bit order) and identity elsewhere.

    Built as ``I ⊗ op`` on a contiguous block followed by conjugation with
    the wire permutation, so non-adjacent wires need no special casing.
    """
    wires = list(wires)
    if 2 ** len(wires) != op.dim:
        raise OperatorError(f"operator of dim {op.dim} cannot act on {len(wires)} wires")
    if len(set(wires)) != len(wires):
        raise OperatorError(f"duplicate wires in {wires}")
    if any(w < 0 or w >= n_wires for w in wires):
        raise OperatorError(f"wires {wires} out of range for {n_wires} wires")
    block = np.kron(np.eye(2 ** (n_wires - len(wires))), op.matrix)
    perm = _wire_permutation(wires, n_wires)
    full = np.empty_like(block)
    full[np.ix_(perm, perm)] = block
    return Operator._known(
        full,
        hermitian=op.is_hermitian,
        unitary=op.is_unitary,
    )


def embed_at(op: Operator, position: int, n_subsystems: int) -> Operator:
    """``op`` on subsystem ``position`` (1-based) of ``n_subsystems`` equal blocks."""
    if not 1 <= position <= n_subsystems:
        raise OperatorError(f"position {position} outside 1..{n_subsystems}")
    k = op.n_wires
    return embed_on_wires(op, range(k * (position - 1), k * position), k * n_subsystems)


def parallel_sum(op: Operator, m: int) -> Operator:
    """Sum of ``m`` copies of ``op``, each embedded on its own subsystem."""
    if m < 1:
        raise OperatorError("m must be positive")
    total = embed_at(op, 1, m)
    for i in range(2, m + 1):
        total = total + embed_at(op, i, m)
    return total


def tensor_power(op: Operator, m: int) -> Operator:
    if m < 1:
        raise OperatorError("m must be positive")
    return tensor_all([op] * m)


def evolve(h: Operator, t: float) -> Operator:
    """``exp(-i h t)`` from the eigendecomposition of ``h``."""
    if not h.is_hermitian:
        raise OperatorError("evolution generator must be Hermitian")
    u = np.zeros((h.dim, h.dim), dtype=complex)
    for idx, w, v in h.eigensystem:
        u[np.ix_(idx, idx)] = (v * np.exp(-1j * t * w)) @ v.conj().T
    return Operator(u)


def closed_form_evolve(h: Operator, t: float) -> Operator:
    """``cos(t) I - i sin(t) h``, exact when ``h`` squares to the identity."""
    if not (h.is_hermitian and h.is_unitary):
        raise OperatorError("closed form needs a Hermitian and unitary generator")
    return Operator(np.cos(t) * np.eye(h.dim) - 1j * np.sin(t) * h.matrix)


def equal_up_to_global_phase(u: Operator, v: Operator, tol: float = 1e-9) -> tuple[bool, float]:
    """Compare unitaries by ``|tr(u^† v)| / dim``; returns ``(equal, phase)``."""
    if u.dim != v.dim:
        raise OperatorError(f"dimension mismatch: {u.dim} vs {v.dim}")
    overlap = np.sum(u.matrix.conj() * v.matrix)
    fidelity = abs(overlap) / u.dim
    return bool(fidelity >= 1 - tol), float(np.angle(overlap))


def trace_fidelity(u: Operator, v: Operator) -> float:
    if u.dim != v.dim:
        raise OperatorError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return float(abs(np.sum(u.matrix.conj() * v.matrix)) / u.dim)


def apply_local(state: np.ndarray, local: np.ndarray, wires: Sequence[int], n_wires: int) -> np.ndarray:
    """Apply a ``2**k`` matrix acting on ``wires`` to an ``n_wires`` state vector."""
    k = len(wires)
    if k == 0:
        return local[0, 0] * state
    psi = state.reshape([2] * n_wires)
    u = local.reshape([2] * (2 * k))
    # tensor axis a holds wire n-1-a; local axis a holds local wire k-1-a
    psi_axes = [n_wires - 1 - wires[k - 1 - a] for a in range(k)]
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), psi_axes))
    return np.moveaxis(out, list(range(k)), psi_axes).reshape(-1)
