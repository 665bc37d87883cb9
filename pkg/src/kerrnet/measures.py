"""Entanglement and state diagnostics built on partial trace / transpose.

Negativity follows N(rho) = sum_i (|l_i| - l_i)/2 over the eigenvalues l_i of
the partially transposed density matrix; every other measure here composes it
with reductions.  All functions accept either a PureState or a DensityMatrix
on a constrained or full-grid basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import BasisMismatchError
from .fock import DensityMatrix, PureState


@dataclass(frozen=True)
class Partition:
    """Two disjoint site-mode sets; uncovered site-modes are traced out first."""

    side_a: frozenset[int]
    side_b: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "side_a", frozenset(self.side_a))
        object.__setattr__(self, "side_b", frozenset(self.side_b))
        if not self.side_a or not self.side_b:
            raise ValueError("both partition sides must be nonempty")
        if self.side_a & self.side_b:
            raise ValueError("partition sides must be disjoint")

    @property
    def covered(self) -> list[int]:
        return sorted(self.side_a | self.side_b)


def species_partition(basis) -> Partition:
    """All mode-a site-modes versus all mode-b site-modes."""
    return Partition(frozenset(basis.mode_sites(0)), frozenset(basis.mode_sites(1)))


def _negative_sum(eigenvalues: np.ndarray) -> float:
    return float(np.sum((np.abs(eigenvalues) - eigenvalues) / 2))


def negativity(state, partition: Partition) -> float:
    """Absolute sum of negative eigenvalues of the partial transpose."""
    nsm = state.basis.n_site_modes
    covered = partition.covered
    if covered[-1] >= nsm:
        raise ValueError("partition references site-modes outside the basis")
    if len(covered) < nsm:
        reduced = fock.partial_trace(state, covered)
        side_a = [covered.index(s) for s in sorted(partition.side_a)]
        pt = fock.partial_transpose(reduced, side_a)
    else:
        dm = state.to_density() if isinstance(state, PureState) else state
        pt = fock.partial_transpose(dm, sorted(partition.side_a))
    return _negative_sum(np.linalg.eigvalsh(pt))


def global_negativity(state) -> float:
    """Negativity across the all-a-modes | all-b-modes bipartition."""
    return negativity(state, species_partition(state.basis))


def pairwise_negativity(state, site_mode_i: int, site_mode_j: int) -> float:
    """Trace out everything but two site-modes, then their mutual negativity."""
    if site_mode_i == site_mode_j:
        raise ValueError("site-modes must be distinct")
    return negativity(state, Partition(frozenset({site_mode_i}),
                                       frozenset({site_mode_j})))


def _species_reduction(state, species: str) -> DensityMatrix:
    if species not in ("a", "b"):
        raise ValueError("species must be 'a' or 'b'")
    mode = 0 if species == "a" else 1
    return fock.partial_trace(state, state.basis.mode_sites(mode))


def pi_tangle(state, species: str = "a") -> float:
    """Residual-tangle mean over the three cavities of one species.

    pi_i = N_{i(jk)}^2 - N_{ij}^2 - N_{ik}^2 on the species-reduced state;
    the raw value is reported (it may be negative for qudits).
    """
    rho = _species_reduction(state, species)
    n = rho.basis.n_site_modes
    if n != 3:
        raise ValueError("pi tangle is defined for three cavities")
    vals = []
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        one_rest = negativity(rho, Partition(frozenset({i}), frozenset(rest)))
        acc = one_rest ** 2
        for j in rest:
            acc -= pairwise_negativity(rho, i, j) ** 2
        vals.append(acc)
    return float(np.mean(vals))


def geo_mean_tangle(state, species: str = "a") -> float:
    """Geometric mean of the three one-versus-rest negativities of one species."""
    rho = _species_reduction(state, species)
    n = rho.basis.n_site_modes
    if n != 3:
        raise ValueError("geometric-mean tangle is defined for three cavities")
    prod = 1.0
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        prod *= negativity(rho, Partition(frozenset({i}), frozenset(rest)))
    return float(np.cbrt(prod))


def fidelity(state, target: PureState) -> float:
    """tr[rho |t><t|]; reduces to |<t|psi>|^2 for pure input."""
    if isinstance(state, PureState):
        if not state.basis.same_as(target.basis):
            raise BasisMismatchError("state and target bases differ")
        return float(abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)
    if isinstance(state, DensityMatrix):
        t = target.amplitudes
        if not state.basis.same_as(target.basis):
            if state.basis.key()[:3] == target.basis.key()[:3]:
                # same grid shape, different constraint: compare via embeddings
                grid_state = fock.embed_density(state)
                grid_t = fock.embed_state(target)
                return float(np.real(np.vdot(grid_t.amplitudes,
                                             grid_state.matrix @ grid_t.amplitudes)))
            raise BasisMismatchError("state and target bases differ")
        return float(np.real(np.vdot(t, state.matrix @ t)))
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state)!r}")


def schmidt_number(state: PureState, partition: Partition | None = None,
                   tol: float = 1e-6) -> int:
    """Count of singular values above tol * s_max across a full bipartition."""
    if not isinstance(state, PureState):
        raise TypeError("the Schmidt number is defined for pure states")
    basis = state.basis
    if partition is None:
        partition = species_partition(basis)
    nsm = basis.n_site_modes
    if len(partition.covered) != nsm:
        raise ValueError("the partition must cover every site-mode")
    grid = fock.embed_state(state if not state.unnormalized else state.normalized())
    loc = grid.basis.local_dim
    order = sorted(partition.side_a) + sorted(partition.side_b)
    t = grid.amplitudes.reshape((loc,) * nsm).transpose(order)
    mat = t.reshape(loc ** len(partition.side_a), -1)
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * s[0]))
