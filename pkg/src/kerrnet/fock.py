"""Fock-space foundation: occupation bases, ladder operators, partial reductions.

Bases enumerate multi-cavity, multi-mode photon occupations under a per-site
cutoff ``n_max`` and optional per-species constraints.  The occupation vector
lists all cavities of mode 0 first, then all cavities of mode 1, cavity index
ascending; states are kept in strict lexicographic order of that vector so
matrix layouts are reproducible across runs.

Two species constraints are supported:
  * ``species_total``  -- every state carries exactly this many photons per
    mode species (the closed-system sector);
  * ``species_cap``    -- per-species totals may not exceed this value (the
    sector closure needed once photon loss is switched on).

Operators on constrained bases are projective: matrix elements whose target
occupation falls outside the basis are dropped.  Because of that, two-site
transfers (``hop_op``) are built directly from occupation arithmetic instead
of composing single-site ladder operators, whose intermediate state may leave
an exact-total sector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatchError, CapacityError

MAX_BASIS_STATES = 100_000


@dataclass(eq=False)
class OccupationBasis:
    """Ordered occupation-number basis with an occupation -> position bijection."""

    n_cavities: int
    n_modes: int
    n_max: int
    species_total: int | None
    species_cap: int | None
    states: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int] = field(repr=False)
    _grid_pos: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def n_site_modes(self) -> int:
        return self.n_cavities * self.n_modes

    @property
    def local_dim(self) -> int:
        return self.n_max + 1

    def key(self) -> tuple:
        return (self.n_cavities, self.n_modes, self.n_max,
                self.species_total, self.species_cap)

    def same_as(self, other: "OccupationBasis") -> bool:
        return self is other or self.key() == other.key()

    def site_index(self, mode: int, cavity: int) -> int:
        if not (0 <= mode < self.n_modes and 0 <= cavity < self.n_cavities):
            raise IndexError(f"site (mode={mode}, cavity={cavity}) out of range")
        return mode * self.n_cavities + cavity

    def mode_sites(self, mode: int) -> list[int]:
        """Flat site indices of all cavities of one mode species."""
        return [self.site_index(mode, c) for c in range(self.n_cavities)]

    def is_full_grid(self) -> bool:
        return self.species_total is None and self.species_cap is None

    def grid_dim(self) -> int:
        return self.local_dim ** self.n_site_modes

    def grid_positions(self) -> np.ndarray:
        """Row-major position of each basis state in the full tensor grid."""
        if self._grid_pos is None:
            loc = self.local_dim
            pos = np.zeros(self.dim, dtype=np.int64)
            for i, occ in enumerate(self.states):
                p = 0
                for n in occ:
                    p = p * loc + n
                pos[i] = p
            self._grid_pos = pos
        return self._grid_pos


def _species_vectors(n_cavities, n_max, species_total, species_cap):
    out = []
    for v in itertools.product(range(n_max + 1), repeat=n_cavities):
        tot = sum(v)
        if species_total is not None and tot != species_total:
            continue
        if species_cap is not None and tot > species_cap:
            continue
        out.append(v)
    return out


def enumerate_basis(n_cavities: int, n_modes: int = 2, n_max: int = 2,
                    species_total: int | None = None,
                    species_cap: int | None = None,
                    max_states: int = MAX_BASIS_STATES) -> OccupationBasis:
    """Canonical ordered basis of occupation vectors under the given constraints."""
    if n_cavities < 1 or n_modes < 1 or n_max < 1:
        raise ValueError("n_cavities, n_modes and n_max must all be >= 1")
    if species_total is not None and species_cap is not None:
        raise ValueError("species_total and species_cap are mutually exclusive")

    per_species_grid = (n_max + 1) ** n_cavities
    if per_species_grid > max_states:
        raise CapacityError(
            f"per-species grid has {per_species_grid} states (limit {max_states})")
    vecs = _species_vectors(n_cavities, n_max, species_total, species_cap)
    if len(vecs) ** n_modes > max_states:
        raise CapacityError(
            f"basis would have {len(vecs) ** n_modes} states (limit {max_states})")

    states = tuple(sum(combo, ()) for combo in itertools.product(vecs, repeat=n_modes))
    index = {occ: i for i, occ in enumerate(states)}
    return OccupationBasis(n_cavities, n_modes, n_max,
                           species_total, species_cap, states, index)


def full_grid_basis(basis: OccupationBasis) -> OccupationBasis:
    """The unconstrained tensor grid sharing the basis' shape parameters."""
    if basis.is_full_grid():
        return basis
    return enumerate_basis(basis.n_cavities, basis.n_modes, basis.n_max)


@dataclass(eq=False)
class SparseOperator:
    """Complex sparse operator bound to an occupation basis."""

    basis: OccupationBasis
    matrix: sp.csr_matrix

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        d = self.basis.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match basis dim {d}")
        m.sum_duplicates()
        self.matrix = m

    def _same(self, other: "SparseOperator"):
        if not isinstance(other, SparseOperator) or not self.basis.same_as(other.basis):
            raise BasisMismatchError("operands are defined on different bases")

    def __add__(self, other):
        self._same(other)
        return SparseOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        self._same(other)
        return SparseOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, c):
        return SparseOperator(self.basis, self.matrix * complex(c))

    __rmul__ = __mul__

    def __neg__(self):
        return SparseOperator(self.basis, -self.matrix)

    def __matmul__(self, other):
        """Operator composition (matrix product)."""
        self._same(other)
        return SparseOperator(self.basis, (self.matrix @ other.matrix).tocsr())

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix.conj().T.tocsr())

    def apply(self, state):
        """Apply to a PureState (returns PureState) or a raw vector."""
        if isinstance(state, PureState):
            if not self.basis.same_as(state.basis):
                raise BasisMismatchError("operator and state bases differ")
            return PureState(self.basis, self.matrix @ state.amplitudes,
                             unnormalized=True)
        return self.matrix @ np.asarray(state)

    def entries(self) -> list[tuple[int, int, complex]]:
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return diff.nnz == 0 or np.abs(diff.data).max() <= tol


def identity_op(basis: OccupationBasis) -> SparseOperator:
    return SparseOperator(basis, sp.identity(basis.dim, dtype=complex, format="csr"))


def diagonal_op(basis: OccupationBasis, diag) -> SparseOperator:
    diag = np.asarray(diag, dtype=complex)
    if diag.shape != (basis.dim,):
        raise ValueError("diagonal length does not match basis dimension")
    return SparseOperator(basis, sp.diags(diag).tocsr())


def annihilation_op(basis: OccupationBasis, cavity: int, mode: int) -> SparseOperator:
    """Single-site annihilation; transitions leaving the basis are dropped."""
    s = basis.site_index(mode, cavity)
    rows, cols, vals = [], [], []
    for col, occ in enumerate(basis.states):
        n = occ[s]
        if n == 0:
            continue
        tgt = list(occ)
        tgt[s] = n - 1
        row = basis.index.get(tuple(tgt))
        if row is None:
            continue
        rows.append(row)
        cols.append(col)
        vals.append(np.sqrt(n))
    d = basis.dim
    return SparseOperator(basis, sp.csr_matrix((vals, (rows, cols)),
                                               shape=(d, d), dtype=complex))


def creation_op(basis: OccupationBasis, cavity: int, mode: int) -> SparseOperator:
    return annihilation_op(basis, cavity, mode).adjoint()


def number_op(basis: OccupationBasis, cavity: int, mode: int) -> SparseOperator:
    s = basis.site_index(mode, cavity)
    diag = np.array([occ[s] for occ in basis.states], dtype=complex)
    return diagonal_op(basis, diag)


def hop_op(basis: OccupationBasis, mode: int, dest_cavity: int,
           src_cavity: int) -> SparseOperator:
    """Two-site transfer a_dest^dag a_src within one mode species.

    Built directly from occupation arithmetic: on exact-total sectors the
    intermediate single-annihilation state is outside the basis, so composing
    projective ladder operators would give zero.
    """
    sd = basis.site_index(mode, dest_cavity)
    ss = basis.site_index(mode, src_cavity)
    if sd == ss:
        return number_op(basis, dest_cavity, mode)
    rows, cols, vals = [], [], []
    for col, occ in enumerate(basis.states):
        ns = occ[ss]
        if ns == 0 or occ[sd] + 1 > basis.n_max:
            continue
        tgt = list(occ)
        tgt[sd] += 1
        tgt[ss] -= 1
        row = basis.index.get(tuple(tgt))
        if row is None:
            continue
        rows.append(row)
        cols.append(col)
        vals.append(np.sqrt(occ[sd] + 1) * np.sqrt(ns))
    d = basis.dim
    return SparseOperator(basis, sp.csr_matrix((vals, (rows, cols)),
                                               shape=(d, d), dtype=complex))


@dataclass(eq=False)
class PureState:
    """Normalized amplitude vector over an occupation basis."""

    basis: OccupationBasis
    amplitudes: np.ndarray
    unnormalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape != (self.basis.dim,):
            raise ValueError("amplitude length does not match basis dimension")
        if not self.unnormalized and abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("state is not normalized (pass unnormalized=True to allow)")
        self.amplitudes = v

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.basis, self.amplitudes / n)

    def overlap(self, other: "PureState") -> complex:
        if not self.basis.same_as(other.basis):
            raise BasisMismatchError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, op: SparseOperator) -> complex:
        if not self.basis.same_as(op.basis):
            raise BasisMismatchError("operator and state bases differ")
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        v = self.amplitudes
        m = np.outer(v, v.conj())
        # FMA can leave ~1e-32 asymmetry in the outer product; symmetrizing
        # makes the projector exactly Hermitian entry-for-entry.
        return DensityMatrix(self.basis, 0.5 * (m + m.conj().T))


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian unit-trace matrix over an occupation basis."""

    basis: OccupationBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.basis.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match basis dim {d}")
        if np.abs(m - m.conj().T).max() > 1e-9:
            raise ValueError("matrix is not Hermitian within 1e-9")
        if abs(np.trace(m).real - 1.0) > 1e-8:
            raise ValueError("trace differs from 1 by more than 1e-8")
        self.matrix = m

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def validate(self, pos_tol: float = -1e-8) -> None:
        """Full invariant check including positivity (O(dim^3))."""
        from .errors import PositivityError
        lo = self.min_eigenvalue()
        if lo < pos_tol:
            raise PositivityError(f"minimum eigenvalue {lo:.3e} below {pos_tol:.0e}")


def embed_state(state: PureState) -> PureState:
    """Embed a constrained-basis state into the full tensor grid (zero padding)."""
    if state.basis.is_full_grid():
        return state
    grid = full_grid_basis(state.basis)
    full = np.zeros(grid.dim, dtype=complex)
    full[state.basis.grid_positions()] = state.amplitudes
    return PureState(grid, full, unnormalized=state.unnormalized)


def project_state(state: PureState, basis: OccupationBasis) -> PureState:
    """Restrict a full-grid state back onto a constrained basis."""
    if not state.basis.is_full_grid():
        raise ValueError("project_state expects a full-grid state")
    return PureState(basis, state.amplitudes[basis.grid_positions()],
                     unnormalized=True)


def transfer_state(state: PureState, basis: OccupationBasis) -> PureState:
    """Re-express a state on another basis over the same site-mode grid.

    Occupations absent from the target must carry (numerically) zero amplitude.
    """
    if state.basis.same_as(basis):
        return state
    if (state.basis.n_cavities, state.basis.n_modes, state.basis.n_max) != \
            (basis.n_cavities, basis.n_modes, basis.n_max):
        raise BasisMismatchError("bases have different grid shapes")
    v = np.zeros(basis.dim, dtype=complex)
    for amp, occ in zip(state.amplitudes, state.basis.states):
        j = basis.index.get(occ)
        if j is None:
            if abs(amp) > 1e-12:
                raise BasisMismatchError(
                    f"occupation {occ} carries weight but is absent from the target basis")
            continue
        v[j] = amp
    return PureState(basis, v, unnormalized=state.unnormalized)


def embed_density(dm: DensityMatrix) -> DensityMatrix:
    if dm.basis.is_full_grid():
        return dm
    grid = full_grid_basis(dm.basis)
    full = np.zeros((grid.dim, grid.dim), dtype=complex)
    pos = dm.basis.grid_positions()
    full[np.ix_(pos, pos)] = dm.matrix
    return DensityMatrix(grid, full)


def _as_grid_density(state) -> tuple[np.ndarray, OccupationBasis]:
    if isinstance(state, PureState):
        grid = embed_state(state if not state.unnormalized else state.normalized())
        return np.outer(grid.amplitudes, grid.amplitudes.conj()), grid.basis
    if isinstance(state, DensityMatrix):
        grid = embed_density(state)
        return grid.matrix, grid.basis
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state)!r}")


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix on the tensor grid of the kept site-modes.

    ``keep`` holds flat site-mode indices; the reduced basis orders them
    ascending, each with local dimension n_max + 1.
    """
    nsm = state.basis.n_site_modes
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= nsm:
        raise ValueError("keep contains site-modes out of range")

    loc = state.basis.local_dim
    rest = [s for s in range(nsm) if s not in keep]
    dk = loc ** len(keep)
    out_basis = enumerate_basis(len(keep), 1, state.basis.n_max)

    if isinstance(state, PureState):
        full = embed_state(state if not state.unnormalized else state.normalized())
        t = full.amplitudes.reshape((loc,) * nsm).transpose(keep + rest)
        m = t.reshape(dk, -1)
        red = m @ m.conj().T
    else:
        rho, grid = _as_grid_density(state)
        t = rho.reshape((loc,) * (2 * nsm))
        perm = keep + rest + [nsm + s for s in keep] + [nsm + s for s in rest]
        t = t.transpose(perm)
        dr = loc ** len(rest)
        t = t.reshape(dk, dr, dk, dr)
        red = np.einsum("arbr->ab", t)
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(out_basis, red)


def partial_transpose(dm: DensityMatrix, subset) -> np.ndarray:
    """Transpose the indices of ``subset`` site-modes only (full-grid layout)."""
    subset = sorted(set(subset))
    nsm = dm.basis.n_site_modes
    if not subset or len(subset) >= nsm:
        raise ValueError("subset must be a proper nonempty subset of site-modes")
    if subset[0] < 0 or subset[-1] >= nsm:
        raise ValueError("subset contains site-modes out of range")
    rho, grid = _as_grid_density(dm)
    loc = grid.local_dim
    t = rho.reshape((loc,) * (2 * nsm))
    perm = list(range(2 * nsm))
    for s in subset:
        perm[s], perm[nsm + s] = perm[nsm + s], perm[s]
    return t.transpose(perm).reshape(grid.dim, grid.dim)
