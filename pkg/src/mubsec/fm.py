"""Security of a function of a one-time-padded message.

Alice announces ``a = m + k`` where ``k`` is the distributed key and ``+`` a
group law on ``{0, ..., D-1}``. Given ``a``, the value ``f(m) = f(a - k)`` is
correlated with Eve's probe through the conditional states

    sigma_i^a = (1/q_i) sum_{k: f(a-k) = i} (1/D) rho_k,

whose weights ``q_i`` are the same for every announcement.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .attack import AttackKraus, disturbance, eve_states
from .bounds import fm_bound, ivd_bound
from .errors import InvariantError
from .info import QuantumSource, binary_entropy, measurement_mutual_info, shannon_entropy
from .linalg import DEFAULT_TOL, Povm
from .mub import GeneralizedHadamard, group_ops
from .optimizer import OptimizerConfig, optimize_povm, pretty_good_measurement

GROUP_KINDS = ("cyclic", "xor")


@dataclass(frozen=True)
class FunctionSpec:
    """A function on ``{0, ..., D-1}`` given by its table of integer labels.

    Only the partition into preimages matters; label values are arbitrary.
    """

    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("function table must not be empty")
        object.__setattr__(self, "values", vals)

    @property
    def domain_size(self) -> int:
        return len(self.values)

    def __call__(self, m):
        return np.asarray(self.values)[m]

    def labels(self) -> list[int]:
        return sorted(set(self.values))

    @classmethod
    def identity(cls, dim: int) -> "FunctionSpec":
        return cls(tuple(range(dim)))

    @classmethod
    def constant(cls, dim: int) -> "FunctionSpec":
        return cls((0,) * dim)

    @classmethod
    def indicator(cls, dim: int, point: int = 0) -> "FunctionSpec":
        if not 0 <= point < dim:
            raise ValueError(f"indicator point {point} outside 0..{dim - 1}")
        return cls(tuple(int(m == point) for m in range(dim)))

    @classmethod
    def parse(cls, text: str, dim: int) -> "FunctionSpec":
        """Parse ``identity``, ``constant``, ``indicator:<point>`` or ``table:<v0,v1,...>``."""
        kind, _, arg = text.strip().partition(":")
        try:
            if kind == "identity" and not arg:
                return cls.identity(dim)
            if kind == "constant" and not arg:
                return cls.constant(dim)
            if kind == "indicator":
                return cls.indicator(dim, int(arg) if arg else 0)
            if kind == "table":
                vals = [int(v) for v in arg.split(",")]
                if len(vals) != dim:
                    raise ValueError(f"table has {len(vals)} entries, expected {dim}")
                return cls(tuple(vals))
        except ValueError as exc:
            raise ValueError(f"bad function spec {text!r}: {exc}") from None
        raise ValueError(f"bad function spec {text!r}; expected identity, constant, "
                         "indicator:<point> or table:<comma-list>")


@dataclass(frozen=True)
class GroupLaw:
    """Cyclic addition mod ``D`` or bitwise xor (``D`` a power of two)."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise ValueError(f"unknown group {self.kind!r}; expected one of {GROUP_KINDS}")
        if self.dim < 1:
            raise ValueError("group order must be positive")
        group_ops(self.kind, self.dim)

    def add(self, x, y):
        return group_ops(self.kind, self.dim)[0](np.asarray(x), np.asarray(y))

    def sub(self, x, y):
        return group_ops(self.kind, self.dim)[1](np.asarray(x), np.asarray(y))

    def table(self) -> np.ndarray:
        """Cayley table ``T[x, y] = x + y``."""
        r = np.arange(self.dim)
        return self.add(r[:, None], r[None, :])


@dataclass(frozen=True)
class FmReport:
    h_fk: float
    exact_cond_info: float
    bound: float
    p_err_mub: float
    per_announcement_info: tuple

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_announcement_info"] = list(self.per_announcement_info)
        return d


def _check_dims(f: FunctionSpec, g: GroupLaw, dim: int | None = None) -> None:
    if f.domain_size != g.dim:
        raise ValueError(f"function on {f.domain_size} points with a group of order {g.dim}")
    if dim is not None and dim != g.dim:
        raise ValueError(f"{dim} key values but group of order {g.dim}")


def _weights(f: FunctionSpec, a: int, g: GroupLaw) -> tuple[list[int], np.ndarray]:
    """Labels with non-zero weight and the membership matrix ``[i, k] = [f(a - k) = i]``."""
    k = np.arange(g.dim)
    vals = f(g.sub(a, k))
    labels = f.labels()
    member = np.array([vals == lab for lab in labels], dtype=float)
    return labels, member


def function_entropy(f: FunctionSpec, g: GroupLaw | None = None) -> float:
    """Entropy in bits of ``f(K)`` for uniform ``K``.

    The value distribution is recomputed for every announcement and must not
    change, since ``k -> a - k`` is a bijection.
    """
    g = g or GroupLaw("cyclic", f.domain_size)
    _check_dims(f, g)
    ref = None
    for a in range(g.dim):
        q = _weights(f, a, g)[1].sum(axis=1) / g.dim
        if ref is None:
            ref = q
        elif not np.array_equal(q, ref):
            raise InvariantError(f"value distribution changes at announcement {a}")
    return shannon_entropy(ref)


def indicator_info_profile(dim: int) -> tuple[float, float, float]:
    """``(H(M), H(f(M)), I(f(M); M))`` for the indicator of one point and uniform ``M``.

    ``f(M)`` is a deterministic function of ``M``, so the information equals
    its entropy ``h(1/D)``.
    """
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    h_f = binary_entropy(1.0 / dim)
    return float(np.log2(dim)), h_f, h_f


def sigma_states(eve: QuantumSource, f: FunctionSpec, a: int, g: GroupLaw,
                 tol: float = DEFAULT_TOL) -> list[tuple[float, np.ndarray]]:
    """Weights and conditional probe states ``(q_i, sigma_i^a)`` for announcement ``a``.

    Only labels with ``q_i > 0`` are returned, in increasing label order.

    Raises
    ------
    ValueError
        If Eve's source does not have uniform priors or sizes disagree.
    """
    _check_dims(f, g, len(eve))
    if np.max(np.abs(eve.priors - 1.0 / len(eve))) > tol:
        raise ValueError("conditional states require uniform priors over the key")
    if not 0 <= a < g.dim:
        raise ValueError(f"announcement {a} outside 0..{g.dim - 1}")
    _, member = _weights(f, a, g)
    out = []
    for row in member:
        q = row.sum() / g.dim
        if q > 0:
            sigma = np.einsum("k,kij->ij", row / g.dim, eve.states) / q
            out.append((float(q), sigma))
    return out


def conditional_source(eve: QuantumSource, f: FunctionSpec, a: int, g: GroupLaw,
                       tol: float = DEFAULT_TOL) -> QuantumSource:
    pairs = sigma_states(eve, f, a, g, tol)
    return QuantumSource(np.stack([s for _, s in pairs]), np.array([q for q, _ in pairs]), tol=tol)


def fm_mutual_info(eve: QuantumSource, povm, f: FunctionSpec, g: GroupLaw,
                   tol: float = DEFAULT_TOL) -> tuple[float, tuple]:
    """Conditional information ``I(f(M); E | A)`` for uniform announcements.

    Parameters
    ----------
    povm : Povm or sequence of Povm
        One measurement used for every announcement, or one per announcement.

    Returns
    -------
    info : float
        Mean of the per-announcement informations, in bits.
    per_announcement : tuple of float
    """
    per_a = list(povm) if isinstance(povm, (list, tuple)) else [povm] * g.dim
    if len(per_a) != g.dim:
        raise ValueError(f"{len(per_a)} measurements for {g.dim} announcements")
    terms = []
    for a, m in enumerate(per_a):
        if m.dim != eve.dim:
            raise ValueError(f"POVM of dimension {m.dim} on a {eve.dim}-dimensional probe")
        src = conditional_source(eve, f, a, g, tol)
        terms.append(measurement_mutual_info(src, m) if len(src) > 1 else 0.0)
    return float(np.mean(terms)), tuple(terms)


def default_povms(eve: QuantumSource, f: FunctionSpec, g: GroupLaw,
                  cfg: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> list[Povm]:
    """Probe computational projectors, then the pretty-good measurement and the
    optimizer output for the conditional states at announcement 0."""
    src = conditional_source(eve, f, 0, g, tol)
    povms = [Povm.computational(eve.dim), pretty_good_measurement(src)]
    povms.append(optimize_povm(src, cfg).povm)
    return povms


def check_theorem2(kraus: AttackKraus, h: GeneralizedHadamard, f: FunctionSpec,
                   g: GroupLaw | None = None, povms: Sequence | None = None,
                   cfg: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> FmReport:
    """Compare the best measured ``I(f(M); E | A)`` against ``H(f(K)) 4 sqrt(P_err)``.

    ``povms`` entries may be a single :class:`Povm` or a per-announcement list.

    Raises
    ------
    InvariantError
        If the measured information exceeds the bound by more than ``tol``, or
        the identity-function bound departs from the basic information bound.
    """
    g = g or GroupLaw("cyclic", kraus.sys_dim)
    eve = eve_states(kraus)
    _check_dims(f, g, len(eve))
    povms = default_povms(eve, f, g, cfg, tol) if povms is None else povms
    if not povms:
        raise ValueError("at least one measurement is required")
    best = None
    for m in povms:
        info, per_a = fm_mutual_info(eve, m, f, g, tol)
        if best is None or info > best[0]:
            best = (info, per_a)
    h_fk = function_entropy(f, g)
    p_err = disturbance(kraus, h, tol).p_err_mub
    bound = fm_bound(h_fk, p_err)
    if f.values == tuple(range(g.dim)):
        ref = ivd_bound(g.dim, p_err)
        if abs(bound - ref) > 1e-12 * max(1.0, ref):
            raise InvariantError(f"identity-function bound {bound!r} differs from {ref!r}")
    if best[0] > bound + tol:
        raise InvariantError(f"conditional information {best[0]!r} exceeds bound {bound!r}")
    return FmReport(h_fk, best[0], bound, p_err, best[1])
