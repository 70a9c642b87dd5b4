"""Dense complex linear algebra for small quantum systems.

Conventions used throughout the package:

* states and operators are plain ``numpy`` complex arrays;
* tensor products use ``np.kron`` ordering, so the first factor is the slow
  (most significant) index: basis state ``|a>|b>`` of dims ``(d1, d2)`` sits
  at flat index ``a * d2 + b``;
* tolerances are absolute and default to ``DEFAULT_TOL``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} contains NaN or infinite entries")


def _as_square(a, what: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    _check_finite(a, what)
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """``(A + A^dag) / 2``, applied to the last two axes."""
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def projector(psi) -> np.ndarray:
    """Return ``|psi><psi|``."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def as_pure_state(psi, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a normalized state vector and return it as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise ValueError(f"state vector must be one-dimensional, got shape {psi.shape}")
    _check_finite(psi, "state vector")
    norm2 = float(np.real(np.vdot(psi, psi)))
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"state vector has squared norm {norm2!r}, expected 1")
    return psi


def as_density_matrix(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a density matrix.

    Checks Hermiticity, positivity and unit trace, each within ``tol``, and
    returns the Hermitian part of the input.
    """
    rho = _as_square(rho, "density matrix")
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    rho = hermitian_part(rho)
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix has trace {tr!r}, expected 1")
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
    return rho


def clipped_eigvalsh(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian PSD matrix with tiny negatives set to zero."""
    w = np.linalg.eigvalsh(hermitian_part(np.asarray(a, dtype=complex)))
    if w.size and w[0] < -tol:
        raise ValueError(f"matrix has negative eigenvalue {w[0]!r}")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True)
class Povm:
    """A finite POVM: positive-semidefinite elements summing to the identity.

    ``elements`` is stored as an ``(n_outcomes, dim, dim)`` read-only array.
    """

    elements: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1] != els.shape[2] or els.shape[0] == 0:
            raise ValueError(f"POVM elements must form an (n, d, d) stack, got {els.shape}")
        _check_finite(els, "POVM")
        for e, el in enumerate(els):
            if not is_hermitian(el, self.tol):
                raise ValueError(f"POVM element {e} is not Hermitian")
            lo = np.linalg.eigvalsh(hermitian_part(el))[0]
            if lo < -self.tol:
                raise ValueError(f"POVM element {e} has negative eigenvalue {lo!r}")
        total = els.sum(axis=0)
        dev = np.max(np.abs(total - np.eye(els.shape[1])))
        if dev > self.tol:
            raise ValueError(f"POVM elements sum to identity only within {dev:.3g}")
        object.__setattr__(self, "elements", _frozen(hermitian_part(els)))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return self.elements.shape[0]

    @classmethod
    def from_basis(cls, basis, tol: float = DEFAULT_TOL) -> "Povm":
        """Projective measurement onto the columns of a unitary."""
        basis = np.asarray(basis, dtype=complex)
        return cls(np.einsum("ik,jk->kij", basis, basis.conj()), tol=tol)

    @classmethod
    def computational(cls, dim: int) -> "Povm":
        return cls.from_basis(np.eye(dim))


def trace_norm(a, tol: float = DEFAULT_TOL) -> float:
    """Trace norm ``Tr|A|`` of a Hermitian matrix.

    Computed as the sum of absolute eigenvalues of the Hermitian part.

    Raises
    ------
    ValueError
        If ``a`` is not square or deviates from Hermitian by more than ``tol``.
    """
    a = _as_square(a)
    if not is_hermitian(a, tol):
        raise ValueError("trace_norm requires a Hermitian matrix")
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(a)))))


def pure_trace_distance(psi, phi, tol: float = DEFAULT_TOL) -> float:
    """``Tr| |psi><psi| - |phi><phi| |`` via the overlap, ``2 sqrt(1 - |<psi|phi>|^2)``."""
    psi = as_pure_state(psi, tol)
    phi = as_pure_state(phi, tol)
    if psi.shape != phi.shape:
        raise ValueError(f"dimension mismatch: {psi.size} vs {phi.size}")
    overlap2 = abs(np.vdot(psi, phi)) ** 2
    return 2.0 * float(np.sqrt(max(0.0, 1.0 - overlap2)))


def mixed_pure_bound(rho, psi, tol: float = DEFAULT_TOL) -> float:
    """Upper bound ``2 sqrt(1 - <psi|rho|psi>)`` on ``Tr|rho - |psi><psi||``."""
    rho = as_density_matrix(rho, tol)
    psi = as_pure_state(psi, tol)
    if rho.shape[0] != psi.size:
        raise ValueError(f"dimension mismatch: {rho.shape[0]} vs {psi.size}")
    fid = float(np.real(np.vdot(psi, rho @ psi)))
    return 2.0 * float(np.sqrt(max(0.0, 1.0 - fid)))


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Square operator on the tensor product of spaces with dimensions ``dims``.
    dims : sequence of int
        Subsystem dimensions, first factor slowest.
    keep : int or sequence of int
        Indices of the subsystems to keep, in their original order.

    The map is linear, so ``rho`` need not be normalized.
    """
    rho = _as_square(rho, "operator")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise ValueError(f"operator of size {rho.shape[0]} does not factor as {dims}")
    keep = sorted({keep} if np.isscalar(keep) else set(keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"invalid subsystem selection {keep} for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [letters[n + i] if i in keep else rows[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d_keep = int(np.prod([dims[i] for i in keep]))
    return red.reshape(d_keep, d_keep)


def tensor(a, b) -> np.ndarray:
    """Kronecker product, first factor slow."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def random_haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The phases of ``R``'s diagonal are folded back into ``Q`` so the result is
    Haar rather than merely unitary.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dim: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random density matrix ``G G^dag / Tr`` with ``G`` a ``dim x rank`` Ginibre matrix."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return hermitian_part(rho / np.real(np.trace(rho)))


def random_povm(dim: int, n_outcomes: int, seed=None) -> Povm:
    """Random full-rank POVM ``S^-1/2 A_e^dag A_e S^-1/2``."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_outcomes, dim, dim)) + 1j * rng.standard_normal((n_outcomes, dim, dim))
    m = np.conj(np.swapaxes(a, 1, 2)) @ a
    return Povm(normalize_povm(m))


def inv_sqrt_psd(s: np.ndarray, cutoff: float = 1e-14) -> np.ndarray:
    """Pseudo-inverse square root of a Hermitian PSD matrix."""
    w, v = np.linalg.eigh(hermitian_part(s))
    inv = np.zeros_like(w)
    mask = w > cutoff * max(1.0, float(w[-1]))
    inv[mask] = 1.0 / np.sqrt(w[mask])
    return (v * inv) @ v.conj().T


def normalize_povm(m: np.ndarray) -> np.ndarray:
    """Symmetric normalization ``S^-1/2 M_e S^-1/2`` with ``S = sum_e M_e``."""
    r = inv_sqrt_psd(m.sum(axis=0))
    return hermitian_part(r @ m @ r)
