"""Eigen-structure versus hopping phase: sweeps, adiabatic tracking and
avoided-level-crossing detection.

On a periodic ring with uniform couplings the Hamiltonian commutes with the
cyclic shift of cavities at every phase, so the dynamics starting from a
shift-symmetric state never leaves the symmetric sector.  The level diagram
relevant to the adiabatic/diabatic passage is therefore the symmetric-sector
one; ``eigen_sweep`` exposes it via ``symmetric_sector=True``.  Crossings
between different shift sectors are exact and carry no avoided gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .fock import OccupationBasis, PureState
from .model import NetworkParams, build_h_int, build_hop_parts


def shift_permutation(basis: OccupationBasis) -> np.ndarray:
    """State permutation of the cyclic cavity shift i -> i+1 (per species)."""
    n = basis.n_cavities
    perm = np.zeros(basis.dim, dtype=np.int64)
    for i, occ in enumerate(basis.states):
        shifted = []
        for mode in range(basis.n_modes):
            seg = occ[mode * n:(mode + 1) * n]
            shifted.extend((seg[-1],) + seg[:-1])
        perm[i] = basis.index[tuple(shifted)]
    return perm


def symmetric_sector_basis(basis: OccupationBasis) -> np.ndarray:
    """Orthonormal columns spanning the shift-symmetric subspace."""
    perm = shift_permutation(basis)
    cols = []
    seen = set()
    for i in range(basis.dim):
        if i in seen:
            continue
        orbit = [i]
        j = perm[i]
        while j != i:
            orbit.append(int(j))
            j = perm[j]
        seen.update(orbit)
        v = np.zeros(basis.dim)
        for j in orbit:
            v[j] += 1.0
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


@dataclass(eq=False)
class SpectrumSweep:
    """Eigenvalues (and optionally eigenvectors) on a phase grid phi_a=phi_b=phi.

    ``levels[g]`` is ascending at every grid point.  When computed in the
    symmetric sector, eigenvectors are lifted back to the sector basis so
    downstream measures apply unchanged.
    """

    phi_grid: np.ndarray
    levels: np.ndarray
    basis: OccupationBasis
    vectors: np.ndarray | None = None
    symmetric_sector: bool = False

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]

    def state_at(self, grid_index: int, level: int) -> PureState:
        if self.vectors is None:
            raise ValueError("sweep was computed without eigenvectors")
        return PureState(self.basis, self.vectors[grid_index, :, level])


def eigen_sweep(params: NetworkParams, phi_grid, n_levels: int | None = None,
                with_vectors: bool = False, symmetric_sector: bool = False,
                basis: OccupationBasis | None = None) -> SpectrumSweep:
    """Hermitian eigendecomposition of H(phi, phi) at every grid point."""
    phi_grid = np.asarray(phi_grid, dtype=float)
    if phi_grid.size == 0:
        raise ValueError("phase grid must be nonempty")
    basis = params.basis() if basis is None else basis

    hint = build_h_int(params, basis).to_dense()
    ta, tb = build_hop_parts(params, basis)
    t_fwd = (ta + tb).to_dense()

    proj = None
    if symmetric_sector:
        if params.topology != "periodic":
            raise ValueError("the shift-symmetric sector needs periodic topology")
        if len(set(params.bond_strengths())) != 1:
            raise ValueError("the shift-symmetric sector needs uniform bond strengths")
        proj = symmetric_sector_basis(basis)

    dim = basis.dim if proj is None else proj.shape[1]
    k = dim if n_levels is None else int(n_levels)
    if not (1 <= k <= dim):
        raise ValueError(f"n_levels must be in [1, {dim}]")

    levels = np.zeros((phi_grid.size, k))
    vectors = np.zeros((phi_grid.size, basis.dim, k), dtype=complex) if with_vectors else None
    for g, phi in enumerate(phi_grid):
        e = np.exp(1j * phi)
        h = hint + e * t_fwd + np.conj(e) * t_fwd.conj().T
        if proj is not None:
            h = proj.T @ h @ proj
        try:
            if with_vectors:
                w, v = np.linalg.eigh(h)
            else:
                w = np.linalg.eigvalsh(h)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigensolver failed at grid index {g} (phi={phi})") from exc
        levels[g] = w[:k]
        if with_vectors:
            vecs = v[:, :k]
            vectors[g] = vecs if proj is None else proj @ vecs
    return SpectrumSweep(phi_grid, levels, basis, vectors, symmetric_sector)


@dataclass
class TrackedPath:
    """Level indices following one eigenstate by overlap continuity."""

    indices: np.ndarray
    overlaps: np.ndarray
    ambiguous: np.ndarray  # grid points where two overlaps tied within 1e-9


def track_state(sweep: SpectrumSweep, start_level_index: int) -> TrackedPath:
    """Follow the eigenvector chain maximizing |overlap| with the previous point."""
    if sweep.vectors is None:
        raise ValueError("track_state needs a sweep computed with vectors")
    if not (0 <= start_level_index < sweep.n_levels):
        raise ValueError("start level out of range")
    npts = sweep.phi_grid.size
    indices = np.zeros(npts, dtype=np.int64)
    overlaps = np.ones(npts)
    ambiguous = np.zeros(npts, dtype=bool)
    indices[0] = start_level_index
    prev = sweep.vectors[0, :, start_level_index]
    for g in range(1, npts):
        ov = np.abs(sweep.vectors[g].conj().T @ prev)
        best = int(np.argmax(ov))
        ties = np.flatnonzero(ov >= ov[best] - 1e-9)
        if ties.size > 1:
            ambiguous[g] = True
            best = int(ties.min())
        indices[g] = best
        overlaps[g] = float(ov[best])
        prev = sweep.vectors[g, :, best]
    return TrackedPath(indices, overlaps, ambiguous)


def detect_alc(sweep: SpectrumSweep, level_pair: tuple[int, int] = (0, 1)
               ) -> list[dict[str, float]]:
    """Interior local minima of the gap between two adjacent levels.

    Each minimum is refined by a parabola through the three neighbouring
    grid points.  Returns [] when the gap has no interior minimum (e.g. the
    phase-independent open-chain spectrum).
    """
    lo, hi = level_pair
    if hi != lo + 1 or not (0 <= lo and hi < sweep.n_levels):
        raise ValueError("level_pair must be (l, l+1) within the sweep")
    gap = sweep.levels[:, hi] - sweep.levels[:, lo]
    phi = sweep.phi_grid
    tol = 1e-10 * max(1.0, float(np.max(gap)))
    out = []
    for i in range(1, gap.size - 1):
        if gap[i] < gap[i - 1] - tol and gap[i] < gap[i + 1] - tol:
            x0, x1, x2 = phi[i - 1], phi[i], phi[i + 1]
            y0, y1, y2 = gap[i - 1], gap[i], gap[i + 1]
            # parabola vertex through three points
            denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
            a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
            b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
            if a > 0:
                xv = -b / (2 * a)
                xv = min(max(xv, x0), x2)
                c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1
                     + x0 * x1 * (x0 - x1) * y2) / denom
                yv = max(a * xv * xv + b * xv + c, 0.0)
            else:
                xv, yv = x1, y1
            out.append({"phi_star": float(xv), "gap": float(yv),
                        "level_pair": level_pair})
    return out
