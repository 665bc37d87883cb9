"""Reproducible experiment presets and machine-readable outputs.

A run is configured by one JSON document (see ``base_config``).  Every CSV a
runner writes is accompanied by a ``<name>.meta.json`` sidecar carrying the
schema version, the column list and the complete resolved configuration, so
downstream tooling can validate inputs without re-deriving anything.
Identical configurations produce byte-identical outputs.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dynamics, fock, measures, model, spectral
from .errors import ConfigError
from .measures import Partition
from .model import NetworkParams, NoiseSpec

SCHEMA_VERSION = 1

TRAJECTORY_COLUMNS = ["t", "phi", "fidelity", "energy", "N_G", "N_a1a2",
                      "N_a1a2_b1b2", "pi_tangle", "geo_mean_tangle",
                      "schmidt_number", "trace", "purity"]


def base_config() -> dict:
    """Defaults shared by every scenario (figure presets overlay these)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "model": {
            "n_cavities": 3,
            "j": -1.0,
            "phi_a": 0.0,
            "phi_b": 0.0,
            "k_a": 1.0,
            "k_b": 1.0,
            "k_int": -2.0,
            "topology": "periodic",
            "n_max": 2,
            "species_total": 2,
        },
        "noise": {
            "kind": "none",
            "gamma_a": 0.0,
            "gamma_b": 0.0,
            "gamma": 0.0,
            "theta": math.pi,
        },
        "ramp": {"alpha": 0.15, "phi_start": 0.0, "phi_target": math.pi / 2},
        "integrator": {
            "dt": 1e-3,
            "dt_open": 5e-4,
            "cadence": 100,
            "hold": 0.0,
            "t_max": None,
        },
        "mes": {"m": 3},
        "spectrum": {
            "phi_min": 0.0,
            "phi_max": math.pi,
            "n_points": 721,
            "n_levels": None,
            "level_pair": [0, 1],
            "symmetric_sector": True,
            "with_vectors": False,
        },
        "passage": {"mode": "nonadiabatic"},
        "alpha_scan": {"alpha_grid": [0.1, 0.15, 0.225, 0.34], "hold": 0.0},
        "lossy_prep": {
            "k_runs": [
                {"k": 0.5, "alpha_grid": [0.05, 0.1, 0.15, 0.225, 0.34]},
                {"k": 1.0, "alpha_grid": [0.1, 0.15, 0.225, 0.34, 0.5]},
                {"k": 3.0, "alpha_grid": [0.15, 0.3, 0.6, 1.2, 2.4]},
            ],
            "gamma_grid": [0.0, 0.01, 0.02, 0.04, 0.08, 0.16],
            "inset": {"k": 1.0, "alphas": [0.15, 0.225]},
            "find_gamma_c": False,
            "gamma_c_grid": [0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32],
        },
        "robustness": {
            "channels": ["single_mode_loss", "coupled_two_mode_loss"],
            "t_max": 5.0,
        },
    }


PRESETS: dict[str, dict] = {
    # energy levels vs phase, symmetric sector, k_a = k_b = J
    "fig1": {"subcommand": "spectrum"},
    # non-adiabatic passage with entanglement diagnostics, k = J
    "fig2": {"subcommand": "passage"},
    # tangle comparison along the same passage
    "fig3": {"subcommand": "passage"},
    # loss channels compared on the prepared state, k = J/2, gamma = J
    "fig4": {
        "subcommand": "robustness",
        "model": {"k_a": 0.5, "k_b": 0.5, "k_int": -1.0},
        "noise": {"kind": "single_mode_loss", "gamma_a": 1.0, "gamma_b": 1.0,
                  "gamma": 1.0},
        "robustness": {"channels": ["single_mode_loss", "coupled_two_mode_loss"],
                       "t_max": 5.0},
    },
    # phase-flip channels compared on the prepared state, k = J, gamma = J
    "fig5": {
        "subcommand": "robustness",
        "noise": {"kind": "phase_flip_single", "gamma_a": 1.0, "gamma_b": 1.0,
                  "gamma": 1.0},
        "robustness": {"channels": ["phase_flip_single", "phase_flip_coupled"],
                       "t_max": 10.0},
    },
    # peak fidelity vs loss rate for several k, plus the fixed-alpha inset
    "fig6": {"subcommand": "lossy-prep"},
}


def _merge(dst: dict, src: dict, path: str = "") -> dict:
    for key, val in src.items():
        here = f"{path}.{key}" if path else key
        if key not in dst:
            raise ConfigError(f"unknown configuration key '{here}'")
        if isinstance(dst[key], dict) and isinstance(val, dict):
            _merge(dst[key], val, here)
        else:
            dst[key] = copy.deepcopy(val)
    return dst


def load_config(preset: str | None = None, config_path: str | None = None,
                overrides: list[str] | None = None) -> dict:
    """Base config overlaid with a preset, a JSON file, and --set overrides."""
    cfg = base_config()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'; expected one of {sorted(PRESETS)}")
        overlay = {k: v for k, v in PRESETS[preset].items() if k != "subcommand"}
        _merge(cfg, overlay)
    if config_path is not None:
        try:
            text = Path(config_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{config_path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{config_path}: top level must be a JSON object")
        _merge(cfg, doc)
    for item in overrides or []:
        _apply_override(cfg, item)
    _validate(cfg)
    return cfg


def _apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"--set expects key=value, got '{item}'")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown configuration key '{key}'")
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError(f"unknown configuration key '{key}'")
    node[parts[-1]] = value


def _expect(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"config key '{path}': {msg}")


def _validate(cfg: dict) -> None:
    m = cfg["model"]
    _expect(isinstance(m["n_cavities"], int) and m["n_cavities"] >= 2,
            "model.n_cavities", "integer >= 2 required")
    _expect(m["topology"] in model.TOPOLOGIES, "model.topology",
            f"one of {model.TOPOLOGIES} required")
    _expect(isinstance(m["n_max"], int) and m["n_max"] >= 1,
            "model.n_max", "integer >= 1 required")
    for key in ("k_a", "k_b", "k_int", "phi_a", "phi_b"):
        _expect(isinstance(m[key], (int, float)), f"model.{key}", "number required")
    _expect(isinstance(m["j"], (int, float, list)), "model.j",
            "number or per-bond list required")
    st = m["species_total"]
    _expect(st is None or (isinstance(st, int) and st >= 0),
            "model.species_total", "null or integer >= 0 required")

    n = cfg["noise"]
    _expect(n["kind"] in model.NOISE_KINDS, "noise.kind",
            f"one of {model.NOISE_KINDS} required")
    for key in ("gamma_a", "gamma_b", "gamma"):
        _expect(isinstance(n[key], (int, float)) and n[key] >= 0,
                f"noise.{key}", "nonnegative number required")
    _expect(isinstance(n["theta"], (int, float)) and math.isfinite(n["theta"]),
            "noise.theta", "finite number required")

    r = cfg["ramp"]
    _expect(isinstance(r["alpha"], (int, float)) and r["alpha"] >= 0,
            "ramp.alpha", "nonnegative number required")
    _expect(r["phi_target"] is None or r["phi_target"] >= r["phi_start"],
            "ramp.phi_target", "must be null or >= phi_start")

    it = cfg["integrator"]
    for key in ("dt", "dt_open"):
        _expect(isinstance(it[key], (int, float)) and it[key] > 0,
                f"integrator.{key}", "positive number required")
    _expect(isinstance(it["cadence"], int) and it["cadence"] >= 1,
            "integrator.cadence", "integer >= 1 required")
    _expect(it["t_max"] is None or (isinstance(it["t_max"], (int, float)) and it["t_max"] > 0),
            "integrator.t_max", "null or positive number required")

    sp_ = cfg["spectrum"]
    _expect(isinstance(sp_["n_points"], int) and sp_["n_points"] >= 2,
            "spectrum.n_points", "integer >= 2 required")
    _expect(sp_["phi_max"] > sp_["phi_min"], "spectrum.phi_max", "must exceed phi_min")
    lp = sp_["level_pair"]
    _expect(isinstance(lp, list) and len(lp) == 2 and lp[1] == lp[0] + 1 and lp[0] >= 0,
            "spectrum.level_pair", "adjacent pair [l, l+1] required")

    _expect(cfg["passage"]["mode"] in ("nonadiabatic", "adiabatic"),
            "passage.mode", "one of ('nonadiabatic', 'adiabatic') required")
    _expect(isinstance(cfg["mes"]["m"], int), "mes.m", "integer required")

    lp_ = cfg["lossy_prep"]
    _expect(isinstance(lp_["k_runs"], list) and lp_["k_runs"],
            "lossy_prep.k_runs", "nonempty list required")
    for i, kr in enumerate(lp_["k_runs"]):
        _expect(isinstance(kr, dict) and "k" in kr and "alpha_grid" in kr,
                f"lossy_prep.k_runs[{i}]", "object with 'k' and 'alpha_grid' required")
    rb = cfg["robustness"]
    _expect(isinstance(rb["channels"], list) and len(rb["channels"]) == 2,
            "robustness.channels", "a pair of channel kinds required")
    for ch in rb["channels"]:
        _expect(ch in model.NOISE_KINDS and ch != "none",
                "robustness.channels", f"invalid channel kind '{ch}'")
    _expect(rb["t_max"] > 0, "robustness.t_max", "positive number required")


def network_params(cfg: dict) -> NetworkParams:
    m = cfg["model"]
    j = tuple(m["j"]) if isinstance(m["j"], list) else float(m["j"])
    return NetworkParams(
        n_cavities=m["n_cavities"], j=j, phi_a=m["phi_a"], phi_b=m["phi_b"],
        k_a=m["k_a"], k_b=m["k_b"], k_int=m["k_int"], topology=m["topology"],
        n_max=m["n_max"], species_total=m["species_total"])


def noise_spec(cfg: dict, kind: str | None = None, gamma: float | None = None) -> NoiseSpec:
    n = cfg["noise"]
    kind = n["kind"] if kind is None else kind
    ga = n["gamma_a"] if gamma is None else gamma
    gb = n["gamma_b"] if gamma is None else gamma
    g = n["gamma"] if gamma is None else gamma
    return NoiseSpec(kind=kind, gamma_a=ga, gamma_b=gb, gamma=g, theta=n["theta"])


def ramp_schedule(cfg: dict) -> dynamics.RampSchedule:
    r = cfg["ramp"]
    return dynamics.RampSchedule(r["alpha"], r["phi_start"], r["phi_target"])


# ---------------------------------------------------------------------------
# output helpers

INTEGER_COLUMNS = {"schmidt_number", "level_lo", "level_hi"}


def _fmt(value, column: str) -> str:
    if column in INTEGER_COLUMNS or isinstance(value, (int, np.integer)):
        return str(int(round(float(value))))
    return repr(float(value))


def write_csv(path: Path, columns: list[str], rows, cfg: dict) -> Path:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v, c) for v, c in zip(row, columns)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {
        "schema_version": SCHEMA_VERSION,
        "columns": columns,
        "config": cfg,
    }
    meta_path = path.with_name(path.stem + ".meta.json")
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n",
                         encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# scenario runners

def passage_observables(basis) -> dict:
    """The fixed entanglement diagnostics recorded along a passage."""
    a_sites = basis.mode_sites(0)
    b_sites = basis.mode_sites(1)
    part_read = Partition(frozenset(a_sites[:2]), frozenset(b_sites[:2]))
    return {
        "N_G": measures.global_negativity,
        "N_a1a2": lambda s: measures.pairwise_negativity(s, a_sites[0], a_sites[1]),
        "N_a1a2_b1b2": lambda s: measures.negativity(s, part_read),
        "pi_tangle": lambda s: measures.pi_tangle(s, "a"),
        "geo_mean_tangle": lambda s: measures.geo_mean_tangle(s, "a"),
        "schmidt_number": lambda s: measures.schmidt_number(s),
    }


def run_spectrum(cfg: dict, out_dir: Path) -> list[Path]:
    params = network_params(cfg)
    sc = cfg["spectrum"]
    grid = np.linspace(sc["phi_min"], sc["phi_max"], sc["n_points"])
    sweep = spectral.eigen_sweep(params, grid, n_levels=sc["n_levels"],
                                 with_vectors=sc["with_vectors"],
                                 symmetric_sector=sc["symmetric_sector"])
    columns = ["phi"] + [f"level_{i}" for i in range(sweep.n_levels)]
    rows = [[grid[g]] + sweep.levels[g].tolist() for g in range(grid.size)]
    files = [write_csv(out_dir / "spectrum.csv", columns, rows, cfg)]
    alcs = spectral.detect_alc(sweep, tuple(sc["level_pair"]))
    alc_rows = [[a["phi_star"], a["gap"], a["level_pair"][0], a["level_pair"][1]]
                for a in alcs]
    files.append(write_csv(out_dir / "alc.csv",
                           ["phi_star", "gap", "level_lo", "level_hi"],
                           alc_rows, cfg))
    return files


def _passage_rows_dynamic(cfg: dict, params: NetworkParams) -> list[list]:
    if cfg["noise"]["kind"] != "none":
        raise ConfigError("config key 'noise.kind': the passage scenario is "
                          "closed-system; use alpha-scan or lossy-prep with noise")
    basis = params.basis()
    ramp = ramp_schedule(cfg)
    psi0 = dynamics.ground_state(params, phi=ramp.phi_start)
    target = model.mes_state(basis, m=cfg["mes"]["m"])
    it = cfg["integrator"]
    t_max = it["t_max"] if it["t_max"] is not None else ramp.ramp_time() + it["hold"]
    traj = dynamics.evolve_closed(params, ramp, psi0, dt=it["dt"], t_max=t_max,
                                  target=target,
                                  observables=passage_observables(basis),
                                  cadence=it["cadence"])
    rows = []
    for i in range(traj.times.size):
        rows.append([traj.times[i], traj.phis[i]]
                    + [traj.data[c][i] for c in TRAJECTORY_COLUMNS[2:]])
    return rows


def _passage_rows_adiabatic(cfg: dict, params: NetworkParams) -> list[list]:
    sc = cfg["spectrum"]
    ramp = ramp_schedule(cfg)
    grid = np.linspace(sc["phi_min"], sc["phi_max"], sc["n_points"])
    sweep = spectral.eigen_sweep(params, grid, with_vectors=True,
                                 symmetric_sector=sc["symmetric_sector"])
    path = spectral.track_state(sweep, 0)
    basis = sweep.basis
    target = model.mes_state(basis, m=cfg["mes"]["m"])
    obs = passage_observables(basis)
    rows = []
    for g in range(grid.size):
        state = sweep.state_at(g, int(path.indices[g]))
        t = grid[g] / ramp.alpha if ramp.alpha > 0 else grid[g]
        vals = {name: float(fn(state)) for name, fn in obs.items()}
        rows.append([t, grid[g], measures.fidelity(state, target),
                     sweep.levels[g, path.indices[g]]]
                    + [vals[c] for c in TRAJECTORY_COLUMNS[4:10]]
                    + [1.0, 1.0])
    return rows


def run_passage(cfg: dict, out_dir: Path) -> list[Path]:
    params = network_params(cfg)
    if cfg["passage"]["mode"] == "adiabatic":
        rows = _passage_rows_adiabatic(cfg, params)
    else:
        rows = _passage_rows_dynamic(cfg, params)
    return [write_csv(out_dir / "trajectory.csv", TRAJECTORY_COLUMNS, rows, cfg)]


def run_alpha_scan(cfg: dict, out_dir: Path) -> list[Path]:
    params = network_params(cfg)
    noise = noise_spec(cfg)
    sc = cfg["alpha_scan"]
    it = cfg["integrator"]
    dt = it["dt"] if noise.kind == "none" else it["dt_open"]
    result = dynamics.scan_alpha(params, noise, sc["alpha_grid"], dt=dt,
                                 hold=sc["hold"], m=cfg["mes"]["m"],
                                 cadence=it["cadence"])
    rows = [[a, p] for a, p in result.rows()]
    path = write_csv(out_dir / "alpha_scan.csv", ["alpha", "peak_fidelity"], rows, cfg)
    meta_path = path.with_name(path.stem + ".meta.json")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    meta["result"] = {"alpha_opt": result.alpha_opt}
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n",
                         encoding="utf-8")
    return [path]


def _lossy_peak(params: NetworkParams, alpha: float, gamma: float, cfg: dict) -> float:
    it = cfg["integrator"]
    noise = NoiseSpec(kind="single_mode_loss", gamma_a=gamma, gamma_b=gamma)
    basis = dynamics.noise_basis(params, noise)
    gs = dynamics.ground_state(params, phi=0.0)
    rho0 = fock.transfer_state(gs, basis).to_density()
    target = model.mes_state(basis, m=cfg["mes"]["m"])
    ramp = dynamics.RampSchedule(alpha, 0.0, math.pi / 2)
    traj = dynamics.evolve_lindblad(params, ramp, rho0, noise, dt=it["dt_open"],
                                    t_max=ramp.ramp_time() + it["hold"],
                                    target=target, cadence=it["cadence"])
    return float(traj.peak_fidelity)


def run_lossy_prep(cfg: dict, out_dir: Path) -> list[Path]:
    lp = cfg["lossy_prep"]
    it = cfg["integrator"]
    base = network_params(cfg)
    rows = []
    gamma_c_rows = []
    for kr in lp["k_runs"]:
        k = float(kr["k"])
        params = replace(base, k_a=k, k_b=k, k_int=-2.0 * k)
        scan = dynamics.scan_alpha(params, NoiseSpec(), kr["alpha_grid"],
                                   dt=it["dt"], m=cfg["mes"]["m"],
                                   cadence=it["cadence"])
        alpha = scan.alpha_opt
        for gamma in lp["gamma_grid"]:
            if gamma == 0:
                idx = list(scan.alphas).index(alpha)
                peak = float(scan.peak_fidelities[idx])
            else:
                peak = _lossy_peak(params, alpha, float(gamma), cfg)
            rows.append([gamma, k, alpha, peak])
        if lp["find_gamma_c"]:
            res = dynamics.find_gamma_critical(params, alpha, lp["gamma_c_grid"],
                                               dt=it["dt_open"], hold=4.0,
                                               cadence=it["cadence"],
                                               m=cfg["mes"]["m"])
            gamma_c_rows.append([k, alpha,
                                 math.nan if res.gamma_c is None else res.gamma_c])
    files = [write_csv(out_dir / "fidelity_vs_gamma.csv",
                       ["gamma", "k", "alpha", "peak_fidelity"], rows, cfg)]
    inset = lp["inset"]
    if inset:
        k = float(inset["k"])
        params = replace(base, k_a=k, k_b=k, k_int=-2.0 * k)
        inset_rows = []
        for alpha in inset["alphas"]:
            for gamma in lp["gamma_grid"]:
                if gamma == 0:
                    scan = dynamics.scan_alpha(params, NoiseSpec(), [alpha],
                                               dt=it["dt"], m=cfg["mes"]["m"],
                                               cadence=it["cadence"])
                    peak = float(scan.peak_fidelities[0])
                else:
                    peak = _lossy_peak(params, float(alpha), float(gamma), cfg)
                inset_rows.append([gamma, k, alpha, peak])
        files.append(write_csv(out_dir / "fidelity_vs_gamma_inset.csv",
                               ["gamma", "k", "alpha", "peak_fidelity"],
                               inset_rows, cfg))
    if lp["find_gamma_c"]:
        files.append(write_csv(out_dir / "gamma_c.csv", ["k", "alpha", "gamma_c"],
                               gamma_c_rows, cfg))
    return files


def run_robustness(cfg: dict, out_dir: Path) -> list[Path]:
    params = network_params(cfg)
    rb = cfg["robustness"]
    it = cfg["integrator"]
    hold_phi = math.pi / 2
    ramp = dynamics.RampSchedule(0.0, hold_phi, hold_phi)
    series = []
    times = None
    for kind in rb["channels"]:
        noise = noise_spec(cfg, kind=kind)
        basis = dynamics.noise_basis(params, noise)
        target = model.mes_state(basis, m=cfg["mes"]["m"])
        rho0 = target.to_density()
        traj = dynamics.evolve_lindblad(params, ramp, rho0, noise,
                                        dt=it["dt_open"], t_max=rb["t_max"],
                                        target=target, cadence=it["cadence"])
        series.append(traj.column("fidelity"))
        times = traj.times
    rows = [[times[i], series[0][i], series[1][i]] for i in range(times.size)]
    return [write_csv(out_dir / "robustness.csv",
                      ["t", "fidelity_standard", "fidelity_coupled"], rows, cfg)]
