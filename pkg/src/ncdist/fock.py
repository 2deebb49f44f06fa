"""Truncated multimode Fock-space containers and linear-optics operators.

Conventions used throughout the package:

* A truncated space is a product of per-mode ladders ``0..N_m``; the flat
  basis ordering is row-major (C order) over the multi-index
  ``(n_1, ..., n_M)``, i.e. mode 1 varies slowest. ``np.ravel_multi_index``
  with default order reproduces it.
* State containers carry their truncation. Constructors certify that the
  probability mass lost to truncation is below ``tail_tol`` and raise
  :class:`~ncdist.errors.TruncationTooSmall` with sufficient cutoffs
  otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc

from .errors import DimensionTooLarge, NumericalInconsistency, TruncationTooSmall

# Default probability mass allowed beyond the cutoffs.
DEFAULT_TAIL_TOL = 1e-12
# Largest tolerated deviation from exact Hermiticity on input matrices.
HERMITICITY_TOL = 1e-10
# Hard cap on the flattened basis size (vectors, diagonals).
MAX_BASIS_SIZE = 4_000_000
# Hard cap on the side length of dense matrices.
MAX_DENSE_DIM = 4096


# ---------------------------------------------------------------------------
# truncation bookkeeping


@dataclass(frozen=True)
class TruncationSpec:
    """Per-mode photon-number cutoffs plus the certified tail tolerance."""

    cutoffs: tuple[int, ...]
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        cuts = tuple(int(n) for n in self.cutoffs)
        if len(cuts) == 0:
            raise ValueError("need at least one mode")
        if any(n < 1 for n in cuts):
            raise ValueError(f"every cutoff must be >= 1, got {cuts}")
        object.__setattr__(self, "cutoffs", cuts)
        if not (0 < self.tail_tol < 1):
            raise ValueError(f"tail_tol must be in (0, 1), got {self.tail_tol}")
        if self.dim > MAX_BASIS_SIZE:
            raise DimensionTooLarge(
                f"basis size {self.dim} exceeds the cap {MAX_BASIS_SIZE}"
            )

    @property
    def nmodes(self) -> int:
        return len(self.cutoffs)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.cutoffs)

    @property
    def dim(self) -> int:
        return int(np.prod([n + 1 for n in self.cutoffs], dtype=np.int64))

    def index(self, ns: Sequence[int]) -> int:
        """Flat index of the basis state |n_1..n_M>."""
        return int(np.ravel_multi_index(tuple(int(n) for n in ns), self.shape))

    def unravel(self, i: int) -> tuple[int, ...]:
        return tuple(int(k) for k in np.unravel_index(i, self.shape))

    def union(self, other: "TruncationSpec") -> "TruncationSpec":
        """Elementwise-max cutoffs; the stricter tail tolerance wins."""
        if other.nmodes != self.nmodes:
            raise ValueError("mode count mismatch")
        cuts = tuple(max(a, b) for a, b in zip(self.cutoffs, other.cutoffs))
        return TruncationSpec(cuts, min(self.tail_tol, other.tail_tol))

    def totals(self) -> np.ndarray:
        """Total photon number of every flat basis state (int64, len dim)."""
        out = np.zeros(self.shape, dtype=np.int64)
        for m, n in enumerate(self.cutoffs):
            sl = [None] * self.nmodes
            sl[m] = slice(None)
            out += np.arange(n + 1)[tuple(sl)]
        return out.ravel()


def concat_trunc(a: TruncationSpec, b: TruncationSpec) -> TruncationSpec:
    return TruncationSpec(a.cutoffs + b.cutoffs, min(a.tail_tol, b.tail_tol))


# ---------------------------------------------------------------------------
# state containers


@dataclass
class FockVector:
    """A (possibly sub-normalized) pure state on a truncated Fock space.

    ``amps`` is stored in tensor shape ``trunc.shape``; ``flat`` exposes the
    row-major flattening.
    """

    trunc: TruncationSpec
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != self.trunc.shape:
            raise ValueError(
                f"amplitude shape {amps.shape} does not match cutoffs {self.trunc.cutoffs}"
            )
        self.amps = amps

    @property
    def flat(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat))

    def norm_defect(self) -> float:
        """1 - ||psi||^2, the probability mass beyond the cutoffs."""
        return 1.0 - float(np.vdot(self.flat, self.flat).real)

    def assert_normalized(self, tol: float | None = None):
        tol = self.trunc.tail_tol if tol is None else tol
        if abs(self.norm_defect()) > tol:
            raise TruncationTooSmall(
                f"norm defect {self.norm_defect():.3e} exceeds tolerance {tol:.3e}"
            )

    def pad(self, trunc: TruncationSpec) -> "FockVector":
        """Embed into a space with (elementwise) at-least-as-large cutoffs."""
        if trunc.nmodes != self.trunc.nmodes:
            raise ValueError("mode count mismatch")
        if any(b < a for a, b in zip(self.trunc.cutoffs, trunc.cutoffs)):
            raise ValueError("pad target must not shrink any cutoff")
        out = np.zeros(trunc.shape, dtype=np.complex128)
        out[tuple(slice(0, n + 1) for n in self.trunc.cutoffs)] = self.amps
        return FockVector(trunc, out)

    def probabilities(self) -> np.ndarray:
        """Flat number-basis probabilities |psi_n|^2."""
        f = self.flat
        return (f.real * f.real + f.imag * f.imag)


@dataclass
class DensityMatrix:
    """Dense Hermitian operator on a truncated Fock space."""

    trunc: TruncationSpec
    mat: np.ndarray
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        d = self.trunc.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape}, expected {(d, d)}")
        if d > MAX_DENSE_DIM:
            raise DimensionTooLarge(
                f"dense dimension {d} exceeds the cap {MAX_DENSE_DIM}; "
                "use the diagonal/pure structured paths instead"
            )
        defect = float(np.abs(mat - mat.conj().T).max())
        if defect > HERMITICITY_TOL:
            raise NumericalInconsistency(
                f"matrix is not Hermitian within {HERMITICITY_TOL:.1e} "
                f"(defect {defect:.3e})"
            )
        # store the exactly Hermitian part so downstream eigensolvers see
        # a symmetric input
        self.mat = 0.5 * (mat + mat.conj().T)

    @property
    def dim(self) -> int:
        return self.trunc.dim

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def diagonal(self) -> np.ndarray:
        return self.mat.diagonal().real.copy()

    def is_diagonal(self, tol: float = 1e-14) -> bool:
        off = self.mat - np.diag(self.mat.diagonal())
        return bool(np.abs(off).max() <= tol)

    def purity(self) -> float:
        return float(np.vdot(self.mat, self.mat).real)


# ---------------------------------------------------------------------------
# Poisson helpers (photon statistics of coherent states and phase rings)


def poisson_pmf(energy: float, cutoff: int) -> np.ndarray:
    """pmf of Poisson(energy) on 0..cutoff via the stable upward recurrence."""
    if energy < 0:
        raise ValueError("energy must be >= 0")
    out = np.zeros(cutoff + 1)
    out[0] = math.exp(-energy)
    for k in range(cutoff):
        out[k + 1] = out[k] * energy / (k + 1)
    return out


def poisson_tail(cutoff: int, energy: float) -> float:
    """P[X > cutoff] for X ~ Poisson(energy), exactly, via gammainc."""
    if energy == 0:
        return 0.0
    return float(gammainc(cutoff + 1, energy))


def minimal_cutoff_for_tail(energy: float, tol: float) -> int:
    """Smallest N with Poisson tail beyond N at most tol."""
    n = max(1, int(math.ceil(energy)))
    while poisson_tail(n, energy) > tol:
        n += max(4, n // 2)
    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi) // 2
        if poisson_tail(mid, energy) <= tol:
            hi = mid
        else:
            lo = mid + 1
    return max(1, lo)


def default_cutoff_for_amplitude(a: float) -> int:
    """Cutoff heuristic for a coherent amplitude of magnitude a."""
    return int(math.ceil(a * a + 8.0 * a + 20.0))


def suggest_trunc(
    alphas: Sequence[complex], tail_tol: float = DEFAULT_TAIL_TOL
) -> TruncationSpec:
    """Heuristic cutoffs for a product coherent state, certified upward."""
    cuts = []
    m = len(list(alphas))
    for a in alphas:
        mag = abs(a)
        n = default_cutoff_for_amplitude(mag)
        n = max(n, minimal_cutoff_for_tail(mag * mag, tail_tol / max(m, 1)))
        cuts.append(n)
    return TruncationSpec(tuple(cuts), tail_tol)


# ---------------------------------------------------------------------------
# basic constructors


def number_basis_vector(
    ns: Sequence[int], trunc: TruncationSpec | None = None
) -> FockVector:
    """|n_1 .. n_M> as a FockVector (exact, zero tail)."""
    ns = tuple(int(n) for n in ns)
    if any(n < 0 for n in ns):
        raise ValueError("photon numbers must be >= 0")
    if trunc is None:
        trunc = TruncationSpec(tuple(max(n, 1) for n in ns))
    if any(n > c for n, c in zip(ns, trunc.cutoffs)):
        raise TruncationTooSmall(
            f"cutoffs {trunc.cutoffs} cannot hold |{ns}>",
            suggested_cutoffs=tuple(max(n, 1) for n in ns),
        )
    amps = np.zeros(trunc.shape, dtype=np.complex128)
    amps[ns] = 1.0
    return FockVector(trunc, amps)


def _coherent_mode_amps(alpha: complex, cutoff: int) -> np.ndarray:
    """<n|alpha> for n = 0..cutoff by the stable upward recurrence."""
    out = np.zeros(cutoff + 1, dtype=np.complex128)
    out[0] = math.exp(-0.5 * (abs(alpha) ** 2))
    for n in range(cutoff):
        out[n + 1] = out[n] * alpha / math.sqrt(n + 1)
    return out


def coherent_amps(
    alpha: Sequence[complex] | complex, trunc: TruncationSpec
) -> FockVector:
    """Product coherent state |alpha_1,...,alpha_M> on the truncated space.

    The norm defect equals the exact multivariate Poisson tail
    ``1 - prod_m P[Poisson(|alpha_m|^2) <= N_m]``; if it exceeds
    ``trunc.tail_tol`` the call fails with sufficient cutoffs attached.
    """
    alphas = np.atleast_1d(np.asarray(alpha, dtype=np.complex128))
    if alphas.ndim != 1 or len(alphas) != trunc.nmodes:
        raise ValueError(
            f"got {alphas.size} amplitudes for {trunc.nmodes} modes"
        )
    m = trunc.nmodes
    kept = 1.0
    for a, n in zip(alphas, trunc.cutoffs):
        kept *= 1.0 - poisson_tail(n, abs(a) ** 2)
    defect = 1.0 - kept
    if defect > trunc.tail_tol:
        suggested = tuple(
            max(
                c,
                minimal_cutoff_for_tail(abs(a) ** 2, trunc.tail_tol / m),
            )
            for a, c in zip(alphas, trunc.cutoffs)
        )
        raise TruncationTooSmall(
            f"coherent tail {defect:.3e} exceeds tail_tol {trunc.tail_tol:.1e}",
            suggested_cutoffs=suggested,
        )
    vecs = [_coherent_mode_amps(a, n) for a, n in zip(alphas, trunc.cutoffs)]
    amps = vecs[0]
    for v in vecs[1:]:
        amps = np.multiply.outer(amps, v)
    return FockVector(trunc, amps.reshape(trunc.shape))


# ---------------------------------------------------------------------------
# algebra


def _require_same_trunc(a, b):
    if a.trunc.cutoffs != b.trunc.cutoffs:
        raise ValueError(
            f"truncation mismatch: {a.trunc.cutoffs} vs {b.trunc.cutoffs}"
        )


def overlap(u: FockVector, v: FockVector) -> complex:
    """<u|v> on a common truncation."""
    _require_same_trunc(u, v)
    return complex(np.vdot(u.flat, v.flat))


def outer(psi: FockVector) -> DensityMatrix:
    """|psi><psi| as a dense matrix (subject to the dense-dimension cap)."""
    if psi.trunc.dim > MAX_DENSE_DIM:
        raise DimensionTooLarge(
            f"outer product would be {psi.trunc.dim}x{psi.trunc.dim} dense"
        )
    f = psi.flat
    return DensityMatrix(psi.trunc, np.outer(f, f.conj()))


def tensor(a, b):
    """Tensor product of two FockVectors or two DensityMatrices."""
    if isinstance(a, FockVector) and isinstance(b, FockVector):
        amps = np.multiply.outer(a.amps, b.amps)
        return FockVector(concat_trunc(a.trunc, b.trunc), amps)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        tr = concat_trunc(a.trunc, b.trunc)
        if tr.dim > MAX_DENSE_DIM:
            raise DimensionTooLarge(
                f"tensor product would be {tr.dim}x{tr.dim} dense"
            )
        return DensityMatrix(tr, np.kron(a.mat, b.mat))
    raise TypeError("tensor expects two FockVectors or two DensityMatrices")


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every mode not listed in ``keep`` (order preserved)."""
    keep = tuple(int(k) for k in keep)
    m = rho.trunc.nmodes
    if sorted(set(keep)) != sorted(keep) or any(k < 0 or k >= m for k in keep):
        raise ValueError(f"invalid mode subset {keep} for {m} modes")
    if keep != tuple(sorted(keep)):
        raise ValueError("keep must be sorted (mode order is preserved)")
    shape = rho.trunc.shape
    t = rho.mat.reshape(shape + shape)
    drop = [i for i in range(m) if i not in keep]
    # trace the dropped ket/bra axis pairs, starting from the back so the
    # axis numbering stays valid
    for i in reversed(drop):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    dk = int(np.prod([shape[i] for i in keep], dtype=np.int64))
    cuts = tuple(rho.trunc.cutoffs[i] for i in keep)
    return DensityMatrix(
        TruncationSpec(cuts, rho.trunc.tail_tol), t.reshape(dk, dk)
    )


# ---------------------------------------------------------------------------
# moments


def _strides(shape: tuple[int, ...]) -> list[int]:
    s = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        s[i] = s[i + 1] * shape[i + 1]
    return s


def mode_means(state) -> np.ndarray:
    """<a_m> for every mode, for a FockVector or DensityMatrix."""
    if isinstance(state, FockVector):
        shape = state.trunc.shape
        out = np.zeros(state.trunc.nmodes, dtype=np.complex128)
        for m, nm in enumerate(shape):
            b = np.moveaxis(state.amps, m, 0).reshape(nm, -1)
            w = np.sqrt(np.arange(1, nm))
            out[m] = ((b[:-1].conj() * b[1:]).sum(axis=1) @ w)
        return out
    if isinstance(state, DensityMatrix):
        shape = state.trunc.shape
        dim = state.trunc.dim
        idx = np.arange(dim)
        strides = _strides(shape)
        out = np.zeros(state.trunc.nmodes, dtype=np.complex128)
        for m, nm in enumerate(shape):
            n_m = (idx // strides[m]) % nm
            ok = n_m < nm - 1
            src = idx[ok]
            out[m] = np.sum(
                np.sqrt(n_m[ok] + 1.0) * state.mat[src + strides[m], src]
            )
        return out
    raise TypeError(f"unsupported state type {type(state)!r}")


def mean_total_energy(state) -> float:
    """Expected total photon number."""
    if isinstance(state, FockVector):
        return float(state.probabilities() @ state.trunc.totals())
    if isinstance(state, DensityMatrix):
        return float(state.diagonal() @ state.trunc.totals())
    raise TypeError(f"unsupported state type {type(state)!r}")


# ---------------------------------------------------------------------------
# operators


def annihilation_matrix(cutoff: int) -> np.ndarray:
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    ns = np.arange(1, cutoff + 1)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


@dataclass
class ModewiseUnitary:
    """Operator acting as a product of independent per-mode matrices."""

    trunc: TruncationSpec
    mats: list[np.ndarray]
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.mats) != self.trunc.nmodes:
            raise ValueError("one matrix per mode required")
        for m, u in zip(self.trunc.shape, self.mats):
            if u.shape != (m, m):
                raise ValueError(f"mode matrix shape {u.shape}, expected {(m, m)}")

    def apply_vec(self, psi: FockVector) -> FockVector:
        _require_same_trunc(self, psi)
        amps = psi.amps
        for m, u in enumerate(self.mats):
            amps = np.moveaxis(np.tensordot(u, amps, axes=(1, m)), 0, m)
        return FockVector(psi.trunc, amps)

    def apply_density(self, rho: DensityMatrix) -> DensityMatrix:
        _require_same_trunc(self, rho)
        shape = rho.trunc.shape
        m = len(shape)
        t = rho.mat.reshape(shape + shape)
        for i, u in enumerate(self.mats):
            t = np.moveaxis(np.tensordot(u, t, axes=(1, i)), 0, i)
        for i, u in enumerate(self.mats):
            t = np.moveaxis(np.tensordot(u.conj(), t, axes=(1, m + i)), 0, m + i)
        d = rho.trunc.dim
        return DensityMatrix(rho.trunc, t.reshape(d, d), meta=rho.meta)

    def dagger(self) -> "ModewiseUnitary":
        return ModewiseUnitary(self.trunc, [u.conj().T for u in self.mats], self.meta)

    def unitarity_defect(self) -> float:
        out = 0.0
        for u in self.mats:
            out = max(out, float(np.abs(u.conj().T @ u - np.eye(len(u))).max()))
        return out


@dataclass
class BlockUnitary:
    """Operator block-diagonal over total photon number.

    ``blocks`` maps each total t to (flat basis indices, matrix). Blocks
    whose photon number exceeds some per-mode cutoff are cropped and then
    only sub-unitary; the complete blocks are exactly unitary.
    """

    trunc: TruncationSpec
    blocks: list[tuple[np.ndarray, np.ndarray]]
    meta: dict | None = field(default=None, compare=False)

    def apply_vec(self, psi: FockVector) -> FockVector:
        _require_same_trunc(self, psi)
        v = psi.flat.copy()
        out = np.zeros_like(v)
        for idx, b in self.blocks:
            out[idx] = b @ v[idx]
        return FockVector(psi.trunc, out.reshape(psi.trunc.shape))

    def apply_density(self, rho: DensityMatrix) -> DensityMatrix:
        _require_same_trunc(self, rho)
        out = np.zeros_like(rho.mat)
        for idx_i, bi in self.blocks:
            row = bi @ rho.mat[np.ix_(idx_i, np.arange(rho.trunc.dim))]
            out[idx_i, :] = row
        res = np.zeros_like(rho.mat)
        for idx_j, bj in self.blocks:
            res[:, idx_j] = out[:, idx_j] @ bj.conj().T
        return DensityMatrix(rho.trunc, res, meta=rho.meta)

    def dagger(self) -> "BlockUnitary":
        return BlockUnitary(
            self.trunc,
            [(idx, b.conj().T) for idx, b in self.blocks],
            self.meta,
        )

    def block_unitarity_defects(self) -> list[float]:
        return [
            float(np.abs(b.conj().T @ b - np.eye(b.shape[1])).max())
            for _, b in self.blocks
        ]

    def complete_block_totals(self) -> list[int]:
        """Totals t whose whole photon-number shell fits inside the cutoffs."""
        return [t for t in range(min(self.trunc.cutoffs) + 1)]


def beam_splitter(eta: float) -> np.ndarray:
    """Two-mode mixing matrix with transmissivity eta.

    Convention: creation operators transform as
    ``b1^+ = sqrt(eta) a1^+ + sqrt(1-eta) a2^+`` and
    ``b2^+ = -sqrt(1-eta) a1^+ + sqrt(eta) a2^+``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    t, r = math.sqrt(eta), math.sqrt(1.0 - eta)
    return np.array([[t, r], [-r, t]], dtype=np.complex128)


_PASSIVE_DIM_CAP = 250_000


def passive_unitary(u: np.ndarray, trunc: TruncationSpec) -> BlockUnitary:
    """Fock-space representation of an M-mode passive interferometer.

    ``u`` is the M x M mode matrix: creation operators transform as
    ``W a_m^+ W^+ = sum_j u[j, m] a_j^+``. The representation is assembled
    per total-photon-number block by applying the transformed creation
    monomial to the vacuum.
    """
    u = np.asarray(u, dtype=np.complex128)
    m = trunc.nmodes
    if u.shape != (m, m):
        raise ValueError(f"mode matrix shape {u.shape}, expected {(m, m)}")
    defect = float(np.abs(u.conj().T @ u - np.eye(m)).max())
    if defect > 1e-12:
        raise ValueError(f"mode matrix is not unitary (defect {defect:.3e})")
    if trunc.dim > _PASSIVE_DIM_CAP:
        raise DimensionTooLarge(
            f"passive_unitary at basis size {trunc.dim} exceeds {_PASSIVE_DIM_CAP}"
        )
    shape = trunc.shape
    totals = trunc.totals()
    cutoffs = trunc.cutoffs

    pos_in_block: dict[int, dict[int, int]] = {}
    block_idx: list[np.ndarray] = []
    tmax = int(totals.max())
    for t in range(tmax + 1):
        idx = np.flatnonzero(totals == t)
        block_idx.append(idx)
        pos_in_block[t] = {int(f): k for k, f in enumerate(idx)}

    mats = [
        np.zeros((len(idx), len(idx)), dtype=np.complex128) for idx in block_idx
    ]
    log_fact = np.cumsum(np.log(np.arange(1, max(cutoffs) + 1)))

    def fact_sqrt(ns):
        s = 0.0
        for n in ns:
            if n > 0:
                s += log_fact[n - 1]
        return math.exp(0.5 * s)

    for t in range(tmax + 1):
        for col_pos, flat in enumerate(block_idx[t]):
            ns = trunc.unravel(int(flat))
            state: dict[tuple[int, ...], complex] = {(0,) * m: 1.0 + 0.0j}
            for mode, n_m in enumerate(ns):
                for _ in range(n_m):
                    nxt: dict[tuple[int, ...], complex] = {}
                    for k, amp in state.items():
                        for j in range(m):
                            if k[j] + 1 > cutoffs[j]:
                                continue  # cropped: leaks out of the space
                            coeff = amp * u[j, mode] * math.sqrt(k[j] + 1)
                            k2 = k[:j] + (k[j] + 1,) + k[j + 1 :]
                            nxt[k2] = nxt.get(k2, 0.0) + coeff
                    state = nxt
            norm = fact_sqrt(ns)
            col = mats[t][:, col_pos]
            for k, amp in state.items():
                row_pos = pos_in_block[t][trunc.index(k)]
                col[row_pos] = amp / norm

    return BlockUnitary(
        trunc,
        [(idx, b) for idx, b in zip(block_idx, mats)],
        meta={"mode_matrix": u.copy()},
    )


def displacement(
    gammas: Sequence[complex] | complex, trunc: TruncationSpec
) -> ModewiseUnitary:
    """Mode-wise displacement operator D(gamma) on the truncated space.

    Each per-mode matrix is computed as the exponential of
    ``gamma a^+ - conj(gamma) a`` on an enlarged ladder and then cropped to
    the requested cutoff, which keeps the matrix elements accurate at the
    price of a controlled unitarity defect near the cutoff. Construction
    cross-checks D|0> against the coherent recurrence and refuses cutoffs
    that cannot carry the displaced vacuum.
    """
    gs = np.atleast_1d(np.asarray(gammas, dtype=np.complex128))
    if len(gs) != trunc.nmodes:
        raise ValueError(f"got {gs.size} displacements for {trunc.nmodes} modes")
    try:
        check_vec = coherent_amps(gs, trunc)
    except TruncationTooSmall as err:
        raise TruncationTooSmall(
            f"cutoffs {trunc.cutoffs} cannot carry the displaced vacuum: {err}",
            suggested_cutoffs=err.suggested_cutoffs,
        ) from err

    mats = []
    for g, n in zip(gs, trunc.cutoffs):
        extra = int(math.ceil(4.0 * abs(g) * math.sqrt(max(n, 1)))) + 10
        big = n + extra
        a = annihilation_matrix(big)
        gen = g * a.conj().T - np.conj(g) * a
        full = expm(gen)
        mats.append(np.ascontiguousarray(full[: n + 1, : n + 1]))

    op = ModewiseUnitary(trunc, mats)
    vac = number_basis_vector((0,) * trunc.nmodes, trunc)
    moved = op.apply_vec(vac)
    err2 = float(np.linalg.norm(moved.flat - check_vec.flat) ** 2)
    if err2 > 10.0 * trunc.tail_tol:
        raise NumericalInconsistency(
            f"displaced vacuum deviates from the coherent recurrence "
            f"(squared error {err2:.3e} > 10*tail_tol)"
        )
    op.meta = {
        "gammas": gs.copy(),
        "unitarity_defect": op.unitarity_defect(),
        "vacuum_check_sq_error": err2,
    }
    return op
