"""Physical model assembly: Kerr interaction, phase-dressed hopping, the
paired maximally entangled state, and jump-operator sets for every noise
channel.

Hamiltonian (units of the hopping strength, hbar = 1):

    H_int = sum_i [ k_a (n_i^a)^2 + k_b (n_i^b)^2 + k_int n_i^a n_i^b ]
    H_hop = sum_bonds J_i [ a_i^dag a_{i+1} e^{i phi_a}
                            + b_i^dag b_{i+1} e^{i phi_b} + h.c. ]

The target state pairs the two mode species cavity-by-cavity,

    |MES> = (1/sqrt(d)) sum_n  e^{i (2 pi m / N) p(n)}  |n>_a (x) |n>_b ,

with p increasing by one whenever a photon moves one cavity down the chain.
It is annihilated by H_hop when phi_a + phi_b = (2m - N) pi / N and by H_int
when k_a + k_b + k_int = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import fock
from .fock import OccupationBasis, PureState, SparseOperator

TOPOLOGIES = ("open", "periodic")

NOISE_KINDS = ("none", "single_mode_loss", "coupled_two_mode_loss",
               "phase_flip_single", "phase_flip_coupled")


@dataclass(frozen=True)
class NetworkParams:
    """Full physical configuration of the cavity network."""

    n_cavities: int = 3
    j: float | tuple[float, ...] = 1.0
    phi_a: float = 0.0
    phi_b: float = 0.0
    k_a: float = 1.0
    k_b: float = 1.0
    k_int: float = -2.0
    topology: str = "open"
    n_max: int = 2
    species_total: int | None = 2

    def __post_init__(self):
        if self.n_cavities < 2:
            raise ValueError("need at least two cavities")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        js = self.j if isinstance(self.j, (tuple, list)) else (self.j,)
        if any(isinstance(x, complex) for x in js):
            raise ValueError("hopping strengths must be real")

    @classmethod
    def balanced(cls, k: float, **kwargs) -> "NetworkParams":
        """Couplings (k, k, -2k), satisfying the zero-interaction condition."""
        return cls(k_a=k, k_b=k, k_int=-2.0 * k, **kwargs)

    def with_phases(self, phi_a: float, phi_b: float) -> "NetworkParams":
        return replace(self, phi_a=phi_a, phi_b=phi_b)

    def bonds(self) -> list[tuple[int, int]]:
        """Directed bonds (i, i+1); each contributes a_i^dag a_{i+1} e^{i phi}."""
        n = self.n_cavities
        out = [(i, i + 1) for i in range(n - 1)]
        if self.topology == "periodic":
            out.append((n - 1, 0))
        return out

    def bond_strengths(self) -> list[float]:
        bonds = self.bonds()
        if isinstance(self.j, (tuple, list)):
            if len(self.j) != len(bonds):
                raise ValueError(f"expected {len(bonds)} bond strengths, got {len(self.j)}")
            return [float(x) for x in self.j]
        return [float(self.j)] * len(bonds)

    def basis(self, loss_closed: bool = False) -> OccupationBasis:
        """Sector basis; ``loss_closed`` relaxes exact totals to <= totals."""
        if self.species_total is None:
            return fock.enumerate_basis(self.n_cavities, 2, self.n_max)
        if loss_closed:
            return fock.enumerate_basis(self.n_cavities, 2, self.n_max,
                                        species_cap=self.species_total)
        return fock.enumerate_basis(self.n_cavities, 2, self.n_max,
                                    species_total=self.species_total)


@dataclass(frozen=True)
class NoiseSpec:
    """Channel kind plus decay rates (units of J) and dephasing phase."""

    kind: str = "none"
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    gamma: float = 0.0
    theta: float = math.pi

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if min(self.gamma_a, self.gamma_b, self.gamma) < 0:
            raise ValueError("decay rates must be nonnegative")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


def build_h_int(params: NetworkParams, basis: OccupationBasis) -> SparseOperator:
    """Diagonal Kerr term: self-phase (n^2) plus cross-phase (n_a n_b) per cavity."""
    diag = np.zeros(basis.dim)
    for i, occ in enumerate(basis.states):
        acc = 0.0
        for c in range(basis.n_cavities):
            na = occ[basis.site_index(0, c)]
            nb = occ[basis.site_index(1, c)]
            acc += params.k_a * na * na + params.k_b * nb * nb + params.k_int * na * nb
        diag[i] = acc
    return fock.diagonal_op(basis, diag)


def build_hop_parts(params: NetworkParams, basis: OccupationBasis
                    ) -> tuple[SparseOperator, SparseOperator]:
    """Forward transfer sums (T_a, T_b); H_hop = e^{i phi_a} T_a + e^{i phi_b} T_b + h.c."""
    parts = []
    for mode in (0, 1):
        acc = None
        for (i, inext), jval in zip(params.bonds(), params.bond_strengths()):
            term = jval * fock.hop_op(basis, mode, dest_cavity=i, src_cavity=inext)
            acc = term if acc is None else acc + term
        parts.append(acc)
    return parts[0], parts[1]


def build_h_hop(params: NetworkParams, basis: OccupationBasis,
                phi_a: float | None = None, phi_b: float | None = None) -> SparseOperator:
    phi_a = params.phi_a if phi_a is None else phi_a
    phi_b = params.phi_b if phi_b is None else phi_b
    ta, tb = build_hop_parts(params, basis)
    h = np.exp(1j * phi_a) * ta + np.exp(1j * phi_b) * tb
    return h + h.adjoint()


def build_hamiltonian(params: NetworkParams, phi_a: float | None = None,
                      phi_b: float | None = None,
                      basis: OccupationBasis | None = None) -> SparseOperator:
    basis = params.basis() if basis is None else basis
    return build_h_int(params, basis) + build_h_hop(params, basis, phi_a, phi_b)


def mes_occupations(n_cavities: int, total: int, n_max: int) -> list[tuple[int, ...]]:
    """All per-cavity photon distributions with the given species total."""
    return [v for v in itertools.product(range(n_max + 1), repeat=n_cavities)
            if sum(v) == total]


def hop_counter(occ: tuple[int, ...]) -> int:
    """Phase counter p: increases by one per photon moved one cavity down."""
    n = len(occ)
    return sum((n - 1 - j) * occ[j] for j in range(n))


def mes_state(basis: OccupationBasis, m: int = 3, total: int | None = None) -> PureState:
    """Equal-weight phase-locked superposition of paired occupations.

    Every term puts the same photon distribution in both mode species; the
    term phase is e^{i (2 pi m / N) p} with the hop counter p.
    """
    if basis.n_modes != 2:
        raise ValueError("the paired state needs exactly two mode species")
    n = basis.n_cavities
    if total is None:
        total = basis.species_total if basis.species_total is not None else 2
    terms = mes_occupations(n, total, basis.n_max)
    if not terms:
        raise ValueError("no occupations with the requested species total")
    amp = 1.0 / math.sqrt(len(terms))
    psi = np.zeros(basis.dim, dtype=complex)
    for v in terms:
        i = basis.index.get(v + v)
        if i is None:
            raise ValueError(f"basis lacks the paired occupation {v + v}")
        psi[i] = amp * np.exp(2j * np.pi * m / n * hop_counter(v))
    return PureState(basis, psi)


def mes_phase(m: int, n_cavities: int) -> float:
    """Common phase phi_a = phi_b at which the hopping energy vanishes."""
    return (2 * m - n_cavities) * math.pi / (2 * n_cavities)


def verify_mes_conditions(params: NetworkParams, m: int = 3) -> dict[str, float]:
    """Residual norms of H_hop, H_int and H applied to the paired state."""
    basis = params.basis()
    psi = mes_state(basis, m=m)
    hop = build_h_hop(params, basis)
    hint = build_h_int(params, basis)
    r_hop = float(np.linalg.norm(hop.matrix @ psi.amplitudes))
    r_int = float(np.linalg.norm(hint.matrix @ psi.amplitudes))
    r_tot = float(np.linalg.norm((hop.matrix + hint.matrix) @ psi.amplitudes))
    return {"hop_residual": r_hop, "int_residual": r_int, "total_residual": r_tot}


def phase_flip_op(basis: OccupationBasis, cavity: int, mode: int,
                  theta: float = math.pi) -> SparseOperator:
    """Unitary dephasing jump: identity on |0>, phase e^{i theta} on any occupied level."""
    s = basis.site_index(mode, cavity)
    diag = np.array([1.0 if occ[s] == 0 else np.exp(1j * theta)
                     for occ in basis.states], dtype=complex)
    return fock.diagonal_op(basis, diag)


def jump_operators(noise: NoiseSpec, basis: OccupationBasis
                   ) -> list[tuple[SparseOperator, float]]:
    """Jump operators with rates for the configured channel.

    single_mode_loss     -> a_k (gamma_a) and b_k (gamma_b) per cavity
    coupled_two_mode_loss-> a_k b_k (gamma) per cavity
    phase_flip_single    -> sigma per site-mode (gamma_a / gamma_b)
    phase_flip_coupled   -> sigma_a sigma_b (gamma) per cavity
    """
    n = basis.n_cavities
    if noise.kind == "none":
        return []
    if noise.kind == "single_mode_loss":
        ops = [(fock.annihilation_op(basis, c, 0), noise.gamma_a) for c in range(n)]
        ops += [(fock.annihilation_op(basis, c, 1), noise.gamma_b) for c in range(n)]
        return ops
    if noise.kind == "coupled_two_mode_loss":
        return [(fock.annihilation_op(basis, c, 0) @ fock.annihilation_op(basis, c, 1),
                 noise.gamma) for c in range(n)]
    if noise.kind == "phase_flip_single":
        ops = [(phase_flip_op(basis, c, 0, noise.theta), noise.gamma_a) for c in range(n)]
        ops += [(phase_flip_op(basis, c, 1, noise.theta), noise.gamma_b) for c in range(n)]
        return ops
    if noise.kind == "phase_flip_coupled":
        return [(phase_flip_op(basis, c, 0, noise.theta) @ phase_flip_op(basis, c, 1, noise.theta),
                 noise.gamma) for c in range(n)]
    raise ValueError(f"unknown noise kind {noise.kind!r}")
