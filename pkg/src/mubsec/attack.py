"""Eavesdropping attacks on a single D-level signal.

Eve attaches a probe prepared in ``|probe_init>`` and applies a unitary to
probe (slow index) and system (fast index)::

    |0>_E |i>  ->  sum_j |E_ij>_E |j>

The unnormalized probe vectors ``|E_ij>`` determine everything: Eve's states
``rho_i = sum_j |E_ij><E_ij|``, Bob's channel in the computational basis and
in any basis ``|~i> = sum_j H_ji |j>`` related to it by a generalized
Hadamard matrix ``H``, and the purification used to tie the two together.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .errors import InvariantError
from .info import QuantumSource
from .linalg import DEFAULT_TOL, is_unitary, partial_trace, projector, random_haar_unitary
from .mub import GeneralizedHadamard, group_ops, fourier_matrix, is_group_hadamard

ATTACK_KINDS = ("identity", "basis_copy", "partial_copy", "intercept_resend", "random")


@dataclass(frozen=True)
class EveAttack:
    sys_dim: int
    probe_dim: int
    unitary: np.ndarray
    probe_init: int = 0
    kind: str = "custom"
    theta: float = float("nan")

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex, copy=True)
        n = self.sys_dim * self.probe_dim
        if self.sys_dim < 1 or self.probe_dim < 1 or u.shape != (n, n):
            raise ValueError(f"attack unitary must be {n}x{n} for dims "
                             f"({self.probe_dim}, {self.sys_dim}), got {u.shape}")
        if not 0 <= self.probe_init < self.probe_dim:
            raise ValueError(f"probe_init {self.probe_init} out of range")
        if not is_unitary(u, 1e-10):
            raise ValueError("attack matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True)
class AttackKraus:
    """Table of probe vectors; ``vectors[i, j]`` is ``|E_ij>``."""

    vectors: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex, copy=True)
        if v.ndim != 3 or v.shape[0] != v.shape[1]:
            raise ValueError(f"Kraus table must have shape (D, D, D_E), got {v.shape}")
        norms = np.einsum("ije,ije->i", v.conj(), v).real
        bad = np.flatnonzero(np.abs(norms - 1.0) > self.tol)
        if bad.size:
            raise ValueError(f"row {bad[0]} of the Kraus table has total weight {norms[bad[0]]!r}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def sys_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def probe_dim(self) -> int:
        return self.vectors.shape[2]


@dataclass(frozen=True)
class DisturbanceReport:
    """Bob's channels and the no-error probability in the unbiased basis.

    ``p0`` is the quadruple-sum value; ``p0_channel`` is the diagonal average
    of ``channel_mub``, kept as the independent cross-check.
    """

    channel: np.ndarray
    channel_mub: np.ndarray
    p0: float
    p_err_mub: float
    hadamard_id: str
    p0_channel: float


@dataclass(frozen=True)
class PurificationBundle:
    """Purifications ``|phi_i>`` on probe (x) auxiliary and their Hadamard transforms.

    Vectors are flattened with the probe as the slow index.
    """

    phi: np.ndarray
    phi_tilde: np.ndarray
    alpha: np.ndarray
    hadamard_id: str
    kraus: AttackKraus = field(repr=False, compare=False)


def extract_kraus_vectors(attack: EveAttack) -> AttackKraus:
    """Columns ``U (|probe_init> (x) |i>)`` reshaped into ``|E_ij>``."""
    d, de = attack.sys_dim, attack.probe_dim
    cols = attack.unitary[:, attack.probe_init * d + np.arange(d)]
    # cols[e * d + j, i] -> vectors[i, j, e]
    return AttackKraus(cols.reshape(de, d, d).transpose(2, 1, 0))


def eve_states(kraus: AttackKraus) -> QuantumSource:
    """Eve's probe state for each of Alice's inputs, with uniform priors."""
    e = kraus.vectors
    rhos = np.einsum("ija,ijb->iab", e, e.conj())
    return QuantumSource.uniform(rhos, tol=kraus.tol)


def _check_basis(kraus: AttackKraus, h: GeneralizedHadamard) -> np.ndarray:
    if h.dim != kraus.sys_dim:
        raise ValueError(f"Hadamard of dimension {h.dim} for a {kraus.sys_dim}-level attack")
    return h.matrix


def transformed_vectors(kraus: AttackKraus, h: GeneralizedHadamard) -> np.ndarray:
    """``|~E_ij> = sum_{i'j'} H_i'i H*_j'j |E_i'j'>``."""
    hm = _check_basis(kraus, h)
    return np.einsum("ai,bj,abe->ije", hm, hm.conj(), kraus.vectors)


def bob_channel(kraus: AttackKraus, basis: GeneralizedHadamard | None = None) -> np.ndarray:
    """Stochastic matrix ``P(j|i)`` (rows: Alice's input) in the computational or ``basis`` frame."""
    v = kraus.vectors if basis is None else transformed_vectors(kraus, basis)
    return np.einsum("ije,ije->ij", v.conj(), v).real


def _p0_quadruple_sum(kraus: AttackKraus, hm: np.ndarray) -> float:
    e = kraus.vectors
    d = kraus.sys_dim
    gram = np.einsum("lke,mne->lkmn", e.conj(), e)
    a = hm.conj()[:, None, :] * hm[None, :, :]          # a[l, k, i] = H*_li H_ki
    weights = np.einsum("lki,mni->lkmn", a, a.conj())   # sum_i H*_li H_ki H_mi H*_ni
    return float(np.real(np.sum(gram * weights)) / d)


def disturbance(kraus: AttackKraus, h: GeneralizedHadamard, tol: float = DEFAULT_TOL) -> DisturbanceReport:
    """No-error probability in the ``h`` basis, evaluated along two independent routes.

    ``p_err_mub`` is summed from the off-diagonal channel entries, so it is
    accurate to round-off even when it is tiny.

    Raises
    ------
    InvariantError
        If the quadruple sum and the channel diagonal disagree by more than
        ``max(tol, 1e-7)``.
    """
    hm = _check_basis(kraus, h)
    channel = bob_channel(kraus)
    channel_mub = bob_channel(kraus, h)
    p0 = _p0_quadruple_sum(kraus, hm)
    p0_channel = float(np.mean(np.diag(channel_mub)))
    if abs(p0 - p0_channel) > max(tol, 1e-7):
        raise InvariantError(f"no-error probability routes disagree: {p0!r} vs {p0_channel!r}")
    p0 = min(max(p0, 0.0), 1.0)
    # off-diagonal mass avoids the cancellation in 1 - p0 near zero disturbance
    off = channel_mub - np.diag(np.diag(channel_mub))
    p_err = min(max(float(np.mean(off.sum(axis=1))), 0.0), 1.0)
    return DisturbanceReport(channel, channel_mub, p0, p_err, h.name, p0_channel)


def build_purification(kraus: AttackKraus, h: GeneralizedHadamard,
                       tol: float = DEFAULT_TOL) -> PurificationBundle:
    """Purify each ``rho_i`` with auxiliary basis ``alpha_lki = H_li H*_ki / H*_l0``.

    The returned bundle is checked for orthonormal auxiliary bases, for
    ``Tr_aux |phi_i><phi_i| = rho_i`` and for ``<~phi_0|~phi_0> = D P0``.
    """
    hm = _check_basis(kraus, h)
    d, de = kraus.sys_dim, kraus.probe_dim
    alpha = hm[:, None, :] * hm.conj()[None, :, :] / hm[:, 0].conj()[:, None, None]
    gram = np.einsum("lki,lmi->lkm", alpha.conj(), alpha)
    dev = np.max(np.abs(gram - np.eye(d)[None]))
    if dev > tol:
        raise InvariantError(f"auxiliary bases not orthonormal (deviation {dev:.3g})")

    phi = np.einsum("lke,lki->lei", kraus.vectors, alpha).reshape(d, de * d)
    phi_tilde = np.einsum("ij,ia->ja", hm.conj(), phi)

    rhos = eve_states(kraus).states
    for i in range(d):
        red = partial_trace(projector(phi[i]), (de, d), keep=0)
        dev = np.max(np.abs(red - rhos[i]))
        if dev > tol:
            raise InvariantError(f"purification {i} reduces to the wrong state (deviation {dev:.3g})")

    p0 = disturbance(kraus, h, tol).p0
    norm0 = float(np.real(np.vdot(phi_tilde[0], phi_tilde[0])))
    if abs(norm0 - d * p0) > tol:
        raise InvariantError(f"<~phi_0|~phi_0> = {norm0!r} but D*P0 = {d * p0!r}")
    for arr in (phi, phi_tilde, alpha):
        arr.setflags(write=False)
    return PurificationBundle(phi, phi_tilde, alpha, h.name, kraus)


def hadamard_group(h: GeneralizedHadamard, tol: float = 1e-10) -> str | None:
    """Name of the group law ``h`` is a group Hadamard for, or ``None``."""
    if is_group_hadamard(h, "cyclic", tol):
        return "cyclic"
    if not h.dim & (h.dim - 1) and is_group_hadamard(h, "xor", tol):
        return "xor"
    return None


def footnote_error_spectrum(bundle: PurificationBundle, h: GeneralizedHadamard,
                            tol: float = DEFAULT_TOL) -> np.ndarray:
    """Error spectrum ``P_e = <~phi_e|~phi_e> / D`` for a group-structured Hadamard.

    ``P_e`` is the probability, averaged over Alice's input ``i``, that Bob
    decodes ``i + e`` in the ``h`` basis. The spectrum is cross-checked
    against Bob's channel computed directly from the Kraus table.
    """
    group = hadamard_group(h)
    if group is None:
        raise ValueError(f"Hadamard {h.name!r} is not group-structured")
    if bundle.hadamard_id != h.name:
        raise ValueError(f"bundle was built for {bundle.hadamard_id!r}, not {h.name!r}")
    d = h.dim
    spectrum = np.real(np.einsum("ea,ea->e", bundle.phi_tilde.conj(), bundle.phi_tilde)) / d

    add, _ = group_ops(group, d)
    channel_mub = bob_channel(bundle.kraus, h)
    i = np.arange(d)
    direct = np.array([channel_mub[i, add(i, e)].mean() for e in range(d)])
    dev = np.max(np.abs(spectrum - direct))
    if dev > tol:
        raise InvariantError(f"error spectrum disagrees with Bob's channel by {dev:.3g}")
    if abs(spectrum.sum() - 1.0) > tol:
        raise InvariantError(f"error spectrum sums to {spectrum.sum()!r}")
    return spectrum


def _embed_isometry(v: np.ndarray) -> np.ndarray:
    """Unitary whose first columns are the isometry ``v``."""
    return np.hstack([v, null_space(v.conj().T)])


def _resolve_basis(basis, dim: int) -> np.ndarray:
    if basis is None or (isinstance(basis, str) and basis == "computational"):
        return np.eye(dim, dtype=complex)
    if isinstance(basis, str) and basis == "fourier":
        return fourier_matrix(dim).matrix
    b = np.asarray(getattr(basis, "matrix", basis), dtype=complex)
    if b.shape != (dim, dim) or not is_unitary(b, 1e-10):
        raise ValueError("intercept-resend basis must be a unitary of the system dimension")
    return b


def builtin_attack(kind: str, dim: int, probe_dim: int | None = None, *,
                   theta: float | None = None, basis=None, seed=None) -> EveAttack:
    """Canonical attack families.

    Parameters
    ----------
    kind : str
        ``identity``, ``basis_copy``, ``partial_copy`` (needs ``theta`` in
        ``[0, pi/2]``), ``intercept_resend`` (measures in ``basis``, default
        computational) or ``random`` (Haar unitary drawn from ``seed``).
    dim, probe_dim : int
        System and probe dimensions; the probe defaults to ``dim**2``.

    ``partial_copy`` rotates the probe from ``|0>`` towards ``|i>`` by
    ``theta`` conditioned on the system being ``|i>`` (``i >= 1``), so theta
    0 is the identity and theta pi/2 acts on ``|0>_E`` exactly like
    ``basis_copy``.
    """
    if dim < 2:
        raise ValueError("system dimension must be at least 2")
    de = dim * dim if probe_dim is None else int(probe_dim)
    n = de * dim
    th = float("nan")
    if kind == "identity":
        u = np.eye(n, dtype=complex)
    elif kind == "basis_copy":
        if de < dim:
            raise ValueError(f"basis copy needs probe_dim >= {dim}, got {de}")
        u = np.zeros((n, n), dtype=complex)
        for e in range(de):
            for i in range(dim):
                u[((e + i) % de) * dim + i, e * dim + i] = 1.0
    elif kind == "partial_copy":
        if de < dim:
            raise ValueError(f"partial copy needs probe_dim >= {dim}, got {de}")
        if theta is None or not 0.0 <= theta <= np.pi / 2:
            raise ValueError(f"partial copy needs theta in [0, pi/2], got {theta!r}")
        th = float(theta)
        c, s = np.cos(th), np.sin(th)
        u = np.eye(n, dtype=complex)
        for i in range(1, dim):
            a, b = 0 * dim + i, i * dim + i
            u[a, a], u[b, a] = c, s
            u[a, b], u[b, b] = -s, c
    elif kind == "intercept_resend":
        if de < dim * dim:
            raise ValueError(f"intercept-resend needs probe_dim >= {dim * dim}, got {de}")
        b = _resolve_basis(basis, dim)
        v = np.zeros((n, dim), dtype=complex)
        for i in range(dim):
            for m in range(dim):
                # outcome m recorded in the probe, |b_m> forwarded to Bob
                v[m * dim:(m + 1) * dim, i] += np.conj(b[i, m]) * b[:, m]
        u = _embed_isometry(v)
    elif kind == "random":
        u = random_haar_unitary(n, seed)
    else:
        raise ValueError(f"unknown attack kind {kind!r}; expected one of {ATTACK_KINDS}")
    return EveAttack(dim, de, u, 0, kind, th)
