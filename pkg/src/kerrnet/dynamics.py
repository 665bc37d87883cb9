"""Time evolution: closed Schroedinger dynamics under a linear phase ramp,
Lindblad dynamics for every noise channel, a dense superoperator oracle, and
the ramp-speed / loss-rate scan procedures.

Both integrators are classical fixed-step 4th-order Runge-Kutta; trajectories
are fully deterministic.  The Lindblad right-hand side acts on the row-major
vectorization of rho through precomputed sparse superoperator blocks, split
into a phase-independent part and the two phase-dressed hopping commutators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from . import fock
from .errors import CapacityError, PositivityError, StepSizeError
from .fock import DensityMatrix, OccupationBasis, PureState
from .model import (NetworkParams, NoiseSpec, build_h_int, build_hop_parts,
                    jump_operators, mes_state)

ORACLE_DIM_CAP = 64

LOSSY_KINDS = ("single_mode_loss", "coupled_two_mode_loss")


@dataclass(frozen=True)
class RampSchedule:
    """phi(t) = phi_start + alpha t, frozen at phi_target once reached."""

    alpha: float
    phi_start: float = 0.0
    phi_target: float | None = math.pi / 2

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("ramp speed must be nonnegative")
        if self.phi_target is not None and self.phi_target < self.phi_start:
            raise ValueError("phi_target must not precede phi_start")

    def phi(self, t: float) -> float:
        p = self.phi_start + self.alpha * t
        if self.phi_target is not None:
            p = min(p, self.phi_target)
        return p

    def ramp_time(self) -> float:
        """Time at which phi_target is reached (inf for an unbounded ramp)."""
        if self.phi_target is None or self.alpha == 0:
            return math.inf
        return (self.phi_target - self.phi_start) / self.alpha


@dataclass
class Trajectory:
    """Observable records along one deterministic evolution."""

    times: np.ndarray
    phis: np.ndarray
    data: dict[str, np.ndarray]
    dt: float
    peak_fidelity: float | None = None
    peak_time: float | None = None
    final_state: object | None = None

    def column(self, name: str) -> np.ndarray:
        return self.data[name]


class _Recorder:
    def __init__(self):
        self.times = []
        self.phis = []
        self.cols = {}

    def add(self, t, phi, values: dict):
        self.times.append(t)
        self.phis.append(phi)
        for k, v in values.items():
            self.cols.setdefault(k, []).append(v)

    def build(self, dt, peak=None, peak_t=None, final_state=None) -> Trajectory:
        data = {k: np.asarray(v) for k, v in self.cols.items()}
        return Trajectory(np.asarray(self.times), np.asarray(self.phis),
                          data, dt, peak, peak_t, final_state)


def noise_basis(params: NetworkParams, noise: NoiseSpec) -> OccupationBasis:
    """Sector closure appropriate to the channel: loss opens the <=-total sectors."""
    return params.basis(loss_closed=noise.kind in LOSSY_KINDS)


def ground_state(params: NetworkParams, phi: float | None = None,
                 basis: OccupationBasis | None = None) -> PureState:
    """Lowest eigenstate of H(phi, phi) on the closed sector."""
    basis = params.basis() if basis is None else basis
    phi = params.phi_a if phi is None else phi
    hint = build_h_int(params, basis).to_dense()
    ta, tb = build_hop_parts(params, basis)
    t_fwd = (ta + tb).to_dense()
    e = np.exp(1j * phi)
    h = hint + e * t_fwd + np.conj(e) * t_fwd.conj().T
    _, v = np.linalg.eigh(h)
    return PureState(basis, v[:, 0])


def evolve_closed(params: NetworkParams, ramp: RampSchedule, psi0: PureState,
                  dt: float = 1e-3, t_max: float | None = None,
                  target: PureState | None = None,
                  observables: dict | None = None,
                  cadence: int = 100) -> Trajectory:
    """RK4 integration of i dpsi/dt = H(phi(t)) psi with phi_a = phi_b = phi(t).

    The state is renormalized whenever the norm drifts beyond 1e-12; a drift
    above 1e-6 within one step raises StepSizeError.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    basis = psi0.basis
    if t_max is None:
        t_max = ramp.ramp_time()
        if not math.isfinite(t_max):
            raise ValueError("t_max is required for an unbounded ramp")
    hd = np.real(np.diag(build_h_int(params, basis).to_dense())).copy()
    ta, tb = build_hop_parts(params, basis)
    t_fwd = (ta + tb).to_dense()
    t_bwd = t_fwd.conj().T.copy()
    psi = psi0.amplitudes.astype(complex).copy()
    tvec = None if target is None else target.amplitudes

    def rhs(v, t):
        e = np.exp(1j * ramp.phi(t))
        return -1j * (hd * v + e * (t_fwd @ v) + np.conj(e) * (t_bwd @ v))

    def record(rec, t):
        phi = ramp.phi(t)
        e = np.exp(1j * phi)
        hpsi = hd * psi + e * (t_fwd @ psi) + np.conj(e) * (t_bwd @ psi)
        n2 = float(np.real(np.vdot(psi, psi)))
        vals = {"energy": float(np.real(np.vdot(psi, hpsi))),
                "trace": n2, "purity": n2 * n2}
        if tvec is not None:
            vals["fidelity"] = float(abs(np.vdot(tvec, psi)) ** 2)
        if observables:
            state = PureState(basis, psi, unnormalized=True).normalized()
            for name, fn in observables.items():
                vals[name] = float(fn(state))
        rec.add(t, phi, vals)

    nsteps = int(round(t_max / dt))
    rec = _Recorder()
    record(rec, 0.0)
    peak = float(abs(np.vdot(tvec, psi)) ** 2) if tvec is not None else None
    peak_t = 0.0 if tvec is not None else None
    t = 0.0
    for s in range(1, nsteps + 1):
        k1 = rhs(psi, t)
        k2 = rhs(psi + (0.5 * dt) * k1, t + 0.5 * dt)
        k3 = rhs(psi + (0.5 * dt) * k2, t + 0.5 * dt)
        k4 = rhs(psi + dt * k3, t + dt)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = s * dt
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > 1e-6:
            raise StepSizeError(f"norm drifted by {drift:.2e} in one step; reduce dt")
        if drift > 1e-12:
            psi = psi / np.linalg.norm(psi)
        if tvec is not None:
            f = float(abs(np.vdot(tvec, psi)) ** 2)
            if f > peak:
                peak, peak_t = f, t
        if s % cadence == 0 or s == nsteps:
            record(rec, t)
    final = PureState(basis, psi, unnormalized=True).normalized()
    return rec.build(dt, peak, peak_t, final)


def _spre(m: sp.spmatrix) -> sp.csr_matrix:
    return sp.kron(m, sp.identity(m.shape[0], format="csr"), format="csr")


def _spost(m: sp.spmatrix) -> sp.csr_matrix:
    return sp.kron(sp.identity(m.shape[0], format="csr"), m.T, format="csr")


def _dissipator_super(L: sp.spmatrix, rate: float) -> sp.csr_matrix:
    ldl = (L.conj().T @ L).tocsr()
    return (rate / 2.0) * (2.0 * sp.kron(L, L.conj(), format="csr")
                           - _spre(ldl) - _spost(ldl))


def liouvillian_parts(params: NetworkParams, basis: OccupationBasis,
                      noise: NoiseSpec):
    """(L_const, S_fwd, S_bwd): generator = L_const + e^{i phi} S_fwd + e^{-i phi} S_bwd."""
    hint = build_h_int(params, basis).matrix
    ta, tb = build_hop_parts(params, basis)
    t_fwd = (ta + tb).matrix
    t_bwd = t_fwd.conj().T.tocsr()
    l_const = -1j * (_spre(hint) - _spost(hint))
    for op, rate in jump_operators(noise, basis):
        if rate > 0:
            l_const = l_const + _dissipator_super(op.matrix, rate)
    s_fwd = -1j * (_spre(t_fwd) - _spost(t_fwd))
    s_bwd = -1j * (_spre(t_bwd) - _spost(t_bwd))
    return l_const.tocsr(), s_fwd.tocsr(), s_bwd.tocsr()


def evolve_lindblad(params: NetworkParams, ramp: RampSchedule, rho0: DensityMatrix,
                    noise: NoiseSpec, dt: float = 5e-4, t_max: float | None = None,
                    target: PureState | None = None,
                    observables: dict | None = None,
                    cadence: int = 100) -> Trajectory:
    """RK4 integration of the Lindblad master equation under the phase ramp.

    rho is re-symmetrized every step; trace drift beyond 1e-6 raises
    StepSizeError and a recorded minimum eigenvalue below -1e-6 raises
    PositivityError.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    basis = rho0.basis
    if t_max is None:
        t_max = ramp.ramp_time()
        if not math.isfinite(t_max):
            raise ValueError("t_max is required for an unbounded ramp")
    d = basis.dim
    l_const, s_fwd, s_bwd = liouvillian_parts(params, basis, noise)
    hd = np.real(np.diag(build_h_int(params, basis).to_dense())).copy()
    ta, tb = build_hop_parts(params, basis)
    t_fwd = (ta + tb).matrix
    t_bwd = t_fwd.conj().T.tocsr()
    tvec = None if target is None else target.amplitudes
    if tvec is not None and not basis.same_as(target.basis):
        tvec = fock.transfer_state(target, basis).amplitudes

    r = rho0.matrix.reshape(-1).astype(complex)

    def rhs(v, t):
        e = np.exp(1j * ramp.phi(t))
        return l_const @ v + e * (s_fwd @ v) + np.conj(e) * (s_bwd @ v)

    def fid_of(mat):
        return float(np.real(np.vdot(tvec, mat @ tvec)))

    def record(rec, t):
        phi = ramp.phi(t)
        mat = r.reshape(d, d)
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -1e-6:
            raise PositivityError(f"rho eigenvalue {lo:.2e} at t={t:.4f}")
        e = np.exp(1j * phi)
        energy = float(np.real(np.sum(hd * np.real(np.diag(mat)))
                               + e * (t_fwd @ mat).trace()
                               + np.conj(e) * (t_bwd @ mat).trace()))
        vals = {"energy": energy,
                "trace": float(np.real(np.trace(mat))),
                "purity": float(np.real(np.vdot(mat, mat)))}
        if tvec is not None:
            vals["fidelity"] = fid_of(mat)
        if observables:
            dm = DensityMatrix(basis, mat)
            for name, fn in observables.items():
                vals[name] = float(fn(dm))
        rec.add(t, phi, vals)

    nsteps = int(round(t_max / dt))
    rec = _Recorder()
    record(rec, 0.0)
    peak = fid_of(rho0.matrix) if tvec is not None else None
    peak_t = 0.0 if tvec is not None else None
    t = 0.0
    for s in range(1, nsteps + 1):
        k1 = rhs(r, t)
        k2 = rhs(r + (0.5 * dt) * k1, t + 0.5 * dt)
        k3 = rhs(r + (0.5 * dt) * k2, t + 0.5 * dt)
        k4 = rhs(r + dt * k3, t + dt)
        r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = s * dt
        mat = r.reshape(d, d)
        mat = 0.5 * (mat + mat.conj().T)
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > 1e-6:
            raise StepSizeError(f"trace drifted to {tr:.8f} at t={t:.4f}; reduce dt")
        r = mat.reshape(-1)
        if tvec is not None:
            f = fid_of(mat)
            if f > peak:
                peak, peak_t = f, t
        if s % cadence == 0 or s == nsteps:
            record(rec, t)
    final = DensityMatrix(basis, r.reshape(d, d))
    return rec.build(dt, peak, peak_t, final)


def superoperator_oracle(params: NetworkParams, phi: float, noise: NoiseSpec,
                         basis: OccupationBasis | None = None,
                         dim_cap: int = ORACLE_DIM_CAP) -> np.ndarray:
    """Dense vectorized Lindblad generator at fixed phase (validation oracle)."""
    basis = noise_basis(params, noise) if basis is None else basis
    if basis.dim > dim_cap:
        raise CapacityError(f"oracle limited to dim <= {dim_cap}, got {basis.dim}")
    l_const, s_fwd, s_bwd = liouvillian_parts(params, basis, noise)
    e = np.exp(1j * phi)
    return (l_const + e * s_fwd + np.conj(e) * s_bwd).toarray()


def evolve_exact(generator: np.ndarray, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Propagate by the matrix exponential of the dense generator."""
    d = rho0.basis.dim
    if generator.shape != (d * d, d * d):
        raise ValueError("generator dimension does not match the state")
    vec = expm(generator * t) @ rho0.matrix.reshape(-1)
    mat = vec.reshape(d, d)
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(rho0.basis, mat)


@dataclass
class AlphaScanResult:
    alphas: np.ndarray
    peak_fidelities: np.ndarray
    alpha_opt: float

    def rows(self):
        return list(zip(self.alphas.tolist(), self.peak_fidelities.tolist()))


def scan_alpha(params: NetworkParams, noise: NoiseSpec, alpha_grid,
               dt: float | None = None, hold: float = 0.0,
               m: int = 3, cadence: int = 100) -> AlphaScanResult:
    """Peak fidelity to the paired target over the ramp, per ramp speed.

    Each run starts from the phi=0 ground state of the closed sector; ties in
    the peak go to the smaller alpha.
    """
    alphas = np.asarray(list(alpha_grid), dtype=float)
    if alphas.size == 0:
        raise ValueError("alpha grid must be nonempty")
    lossless = noise.kind == "none" or (noise.kind in LOSSY_KINDS
                                        and noise.gamma_a == noise.gamma_b == noise.gamma == 0)
    peaks = np.zeros(alphas.size)
    gs = ground_state(params, phi=0.0)
    for i, alpha in enumerate(alphas):
        ramp = RampSchedule(alpha, 0.0, math.pi / 2)
        t_max = ramp.ramp_time() + hold
        if lossless:
            target = mes_state(gs.basis, m=m)
            traj = evolve_closed(params, ramp, gs, dt=dt or 1e-3, t_max=t_max,
                                 target=target, cadence=cadence)
        else:
            basis = noise_basis(params, noise)
            rho0 = fock.transfer_state(gs, basis).to_density()
            target = mes_state(basis, m=m)
            traj = evolve_lindblad(params, ramp, rho0, noise, dt=dt or 5e-4,
                                   t_max=t_max, target=target, cadence=cadence)
        peaks[i] = traj.peak_fidelity
    best = 0
    for i in range(1, alphas.size):
        if peaks[i] > peaks[best] and not math.isclose(peaks[i], peaks[best]):
            best = i
    return AlphaScanResult(alphas, peaks, float(alphas[best]))


@dataclass
class GammaCriticalResult:
    gamma_c: float | None
    open_ended: bool
    evaluations: list = field(default_factory=list)  # (gamma, prepared, peak)


def _has_preparation_maximum(fidelity: np.ndarray, tol: float = 1e-6) -> bool:
    """True when the series rises above its initial value somewhere.

    Covers both an interior preparation maximum and a run that is still
    rising at its end (the lossless plateau after the phase hold).
    """
    f0 = fidelity[0]
    interior = [fidelity[i] for i in range(1, len(fidelity) - 1)
                if fidelity[i] > fidelity[i - 1] and fidelity[i] > fidelity[i + 1]]
    if any(v > f0 + tol for v in interior):
        return True
    return fidelity[-1] > f0 + tol


def find_gamma_critical(params: NetworkParams, alpha: float, gamma_grid,
                        dt: float | None = None,
                        noise_kind: str = "single_mode_loss",
                        hold: float = 4.0, cadence: int = 100,
                        m: int = 3) -> GammaCriticalResult:
    """Smallest grid rate above which the passage no longer approaches the target.

    A run counts as "preparing" when its fidelity series exhibits a maximum
    above the initial value; the boundary is located by bisection over the
    ascending grid, so only O(log n) of the grid points are evolved.
    """
    grid = np.asarray(list(gamma_grid), dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be ascending and nonempty")
    base = NoiseSpec(kind=noise_kind)
    basis = noise_basis(params, base)
    gs = ground_state(params, phi=0.0)
    rho0 = fock.transfer_state(gs, basis).to_density()
    target = mes_state(basis, m=m)
    ramp = RampSchedule(alpha, 0.0, math.pi / 2)
    t_max = ramp.ramp_time() + hold
    evaluations = []

    def prepared(gamma: float) -> bool:
        noise = NoiseSpec(kind=noise_kind, gamma_a=gamma, gamma_b=gamma, gamma=gamma)
        traj = evolve_lindblad(params, ramp, rho0, noise, dt=dt or 5e-4,
                               t_max=t_max, target=target, cadence=cadence)
        ok = _has_preparation_maximum(traj.column("fidelity"))
        evaluations.append((float(gamma), bool(ok), float(traj.peak_fidelity)))
        return ok

    if prepared(grid[-1]):
        return GammaCriticalResult(None, True, evaluations)
    if grid.size == 1 or not prepared(grid[0]):
        return GammaCriticalResult(float(grid[0]), False, evaluations)
    lo, hi = 0, grid.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prepared(grid[mid]):
            lo = mid
        else:
            hi = mid
    return GammaCriticalResult(float(grid[hi]), False, evaluations)
