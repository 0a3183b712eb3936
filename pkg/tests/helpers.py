"""Independent oracles and corpus builders shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np

from cohpar.circuits import Circuit, random_nand_circuit

X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)


def bits_of(index: int, n: int) -> list[int]:
    return [(index >> l) & 1 for l in range(n)]


def index_of(bits) -> int:
    return sum(b << l for l, b in enumerate(bits))


def toffoli_action_matrix(controls, target, n):
    """Brute-force permutation matrix of a Toffoli, built one basis state at a time."""
    dim = 2**n
    m = np.zeros((dim, dim))
    for i in range(dim):
        b = bits_of(i, n)
        if b[controls[0]] and b[controls[1]]:
            b[target] ^= 1
        m[index_of(b), i] = 1
    return m


def kron_lsb_first(*mats):
    """Kronecker product with the first factor on the least significant bits."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(m, out)
    return out


def spread_by_enumeration(spectra, combine):
    """Spread of an operator whose spectrum is ``combine`` over all eigenvalue tuples."""
    values = [combine(t) for t in itertools.product(*spectra)]
    return max(values) - min(values)


def nand_corpus(count: int = 50, seed: int = 2024, max_inputs: int = 5, max_wires: int = 12) -> list[Circuit]:
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        k = int(rng.integers(2, max_inputs + 1))
        g = int(rng.integers(1, max_wires - k + 1))
        corpus.append(random_nand_circuit(rng, k, g))
    return corpus
