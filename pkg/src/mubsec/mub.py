"""Generalized Hadamard matrices and mutually unbiased bases.

A basis is stored as a unitary whose *columns* are the basis vectors. Two
bases ``B1, B2`` are unbiased when every entry of ``B1^dag B2`` has modulus
``1/sqrt(D)``; in particular any generalized Hadamard matrix ``H`` is
unbiased with respect to the computational basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError
from .linalg import is_unitary

MUB_TOL = 1e-10
MAX_PRIME = 97


@dataclass(frozen=True)
class GeneralizedHadamard:
    """Unitary whose entries all have modulus ``1/sqrt(D)``."""

    matrix: np.ndarray
    name: str = "custom"
    tol: float = field(default=MUB_TOL, compare=False)

    def __post_init__(self):
        h = np.array(self.matrix, dtype=complex, copy=True)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
            raise ValueError(f"Hadamard matrix must be square, got shape {h.shape}")
        if not is_unitary(h, self.tol):
            raise ValueError(f"{self.name}: matrix is not unitary")
        dev = float(np.max(np.abs(np.abs(h) - 1.0 / np.sqrt(h.shape[0]))))
        if dev > self.tol:
            raise ValueError(f"{self.name}: entry moduli deviate from 1/sqrt(D) by {dev:.3g}")
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MubSet:
    dim: int
    bases: tuple
    names: tuple
    construction: str
    max_deviation: float

    def __len__(self) -> int:
        return len(self.bases)

    def hadamards(self) -> list[GeneralizedHadamard]:
        """Bases of the set that are unbiased to the computational basis, as Hadamards."""
        eye = np.eye(self.dim)
        return [GeneralizedHadamard(b, name) for b, name in zip(self.bases, self.names)
                if not np.allclose(b, eye)]


def fourier_matrix(dim: int) -> GeneralizedHadamard:
    """Discrete Fourier matrix ``w^(jk) / sqrt(D)`` with ``w = exp(2 pi i / D)``."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    j = np.arange(dim)
    return GeneralizedHadamard(np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim), "fourier")


def _bit_parity(x: np.ndarray) -> np.ndarray:
    parity = np.zeros_like(x)
    while np.any(x):
        parity ^= x & 1
        x = x >> 1
    return parity


def sylvester_hadamard(n: int) -> GeneralizedHadamard:
    """Real Hadamard ``(-1)^(i . j) / sqrt(2^n)`` with ``i . j`` the bitwise dot product."""
    if n < 1:
        raise ValueError("n must be at least 1")
    idx = np.arange(2 ** n)
    signs = 1.0 - 2.0 * _bit_parity(np.bitwise_and.outer(idx, idx))
    return GeneralizedHadamard(signs / np.sqrt(2 ** n), "sylvester")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def is_mub_pair(b1, b2, tol: float = MUB_TOL) -> tuple[bool, float]:
    """Test unbiasedness of two bases; also return the worst overlap deviation."""
    b1 = np.asarray(b1, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    if b1.shape != b2.shape or b1.ndim != 2 or b1.shape[0] != b1.shape[1]:
        raise ValueError(f"bases must be square of equal size, got {b1.shape} and {b2.shape}")
    dev = float(np.max(np.abs(np.abs(b1.conj().T @ b2) - 1.0 / np.sqrt(b1.shape[0]))))
    return dev <= tol, dev


def prime_mub_set(p: int, include_computational: bool = True) -> MubSet:
    """Complete set of ``p + 1`` mutually unbiased bases in prime dimension ``p``.

    For odd ``p`` basis ``m`` has vectors ``v_k[j] = w^(m j^2 + k j) / sqrt(p)``;
    for ``p = 2`` the eigenbases of the three Pauli operators are returned.
    Every pair is certified with :func:`is_mub_pair` before returning.
    """
    if not is_prime(p) or p > MAX_PRIME:
        raise ValueError(f"p must be a prime <= {MAX_PRIME}, got {p}")
    if p == 2:
        s = 1 / np.sqrt(2)
        bases = [np.array([[1, 1], [1, -1]]) * s, np.array([[1, 1], [1j, -1j]]) * s]
        names = ["pauli-x", "pauli-y"]
        construction = "pauli-eigenbases"
    else:
        j = np.arange(p)[:, None]
        k = np.arange(p)[None, :]
        bases = [np.exp(2j * np.pi * ((m * j * j + k * j) % p) / p) / np.sqrt(p) for m in range(p)]
        names = [f"quadratic-m{m}" for m in range(p)]
        construction = "quadratic-phase"
    if include_computational:
        bases = [np.eye(p, dtype=complex)] + bases
        names = ["computational"] + names
    worst = 0.0
    for a in range(len(bases)):
        if not is_unitary(bases[a], MUB_TOL):
            raise InvariantError(f"basis {names[a]} failed unitarity certification")
        for b in range(a + 1, len(bases)):
            ok, dev = is_mub_pair(bases[a], bases[b])
            if not ok:
                raise InvariantError(f"bases {names[a]}, {names[b]} not unbiased (deviation {dev:.3g})")
            worst = max(worst, dev)
    frozen = []
    for b in bases:
        b = np.array(b, dtype=complex)
        b.setflags(write=False)
        frozen.append(b)
    return MubSet(p, tuple(frozen), tuple(names), construction, worst)


def group_ops(group: str, dim: int):
    """``(add, sub)`` for the cyclic group mod ``dim`` or bitwise xor."""
    if group == "cyclic":
        return (lambda i, j: (i + j) % dim), (lambda i, j: (i - j) % dim)
    if group == "xor":
        if dim & (dim - 1):
            raise ValueError(f"xor group needs a power-of-two dimension, got {dim}")
        return np.bitwise_xor, np.bitwise_xor
    raise ValueError(f"unknown group {group!r}; expected 'cyclic' or 'xor'")


def group_hadamard_deviation(h, group: str) -> float:
    """Worst entrywise error in ``H_ik H_jk = H_(i+j)k / sqrt(D)`` and ``H_ik H*_jk = H_(i-j)k / sqrt(D)``.

    ``h`` may be a :class:`GeneralizedHadamard` or a raw square matrix.
    """
    h = np.asarray(getattr(h, "matrix", h), dtype=complex)
    dim = h.shape[0]
    add, sub = group_ops(group, dim)
    i = np.arange(dim)[:, None]
    j = np.arange(dim)[None, :]
    prod = h[:, None, :] * h[None, :, :]
    cross = h[:, None, :] * h.conj()[None, :, :]
    scale = np.sqrt(dim)
    err_add = np.max(np.abs(prod - h[add(i, j)] / scale))
    err_sub = np.max(np.abs(cross - h[sub(i, j)] / scale))
    return float(max(err_add, err_sub))


def is_group_hadamard(h, group: str, tol: float = MUB_TOL) -> bool:
    """Whether ``h`` satisfies both group-Hadamard identities within ``tol``."""
    return group_hadamard_deviation(h, group) <= tol


def certified_hadamards(dim: int) -> list[GeneralizedHadamard]:
    """Every generalized Hadamard this package offers as a MUB partner in dimension ``dim``.

    Prime dimensions get all non-computational bases of :func:`prime_mub_set`;
    other dimensions get the Fourier matrix, plus the Sylvester matrix when
    ``dim`` is a power of two.
    """
    if is_prime(dim) and dim <= MAX_PRIME:
        return prime_mub_set(dim).hadamards()
    out = [fourier_matrix(dim)]
    if dim >= 2 and not dim & (dim - 1):
        out.append(sylvester_hadamard(dim.bit_length() - 1))
    return out


def hadamard_by_name(dim: int, name: str) -> GeneralizedHadamard:
    """Look up ``fourier``, ``sylvester`` or any basis name of :func:`prime_mub_set`."""
    if name == "fourier":
        return fourier_matrix(dim)
    if name == "sylvester":
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"Sylvester matrices need a power-of-two dimension, got {dim}")
        return sylvester_hadamard(dim.bit_length() - 1)
    if is_prime(dim) and dim <= MAX_PRIME:
        for h in prime_mub_set(dim).hadamards():
            if h.name == name:
                return h
    raise ValueError(f"no Hadamard named {name!r} in dimension {dim}")
