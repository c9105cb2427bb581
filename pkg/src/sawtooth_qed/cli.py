"""Batch command-line interface.

Usage: sawtooth-qed <command> --config <path> [--out <path>]
                    [--format csv|json] [--threads N]

Each invocation runs one command described by a JSON config, writes one
dataset, and exits 0 on success, 1 on a numerical failure inside a
validated run, 2 on a config problem.  Errors emit a one-line JSON
record on stderr so callers can parse failures.  Outputs carry no
timestamps; rerunning the same config reproduces the file byte for byte.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bloch import LatticeParams, band_coupling, band_energies
from .bound_states import (
    FitQualityError,
    bs_phase,
    dominant_momentum,
    find_bound_states,
    localization_length,
)
from .config import COMMANDS, ConfigError, RunConfig, load_config
from .dynamics import (
    build_hamiltonian,
    directional_fractions,
    emitter_excitation,
    evolve,
    photon_populations,
)
from .emission import decay_channels, directionality_ratio
from .greens import self_energy, spectral_parameters
from .io import Dataset, config_hash, export
from .parametric import (
    extract_effective_hopping,
    simulate_parametric_pair,
    swap_time,
)
from .spin_model import effective_couplings

_ENV_THREADS = "SAWTOOTH_QED_THREADS"
_NAN = float("nan")


def _metadata(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "config_hash": config_hash(cfg.raw),
        "version": __version__,
        "unit": cfg.unit,
        "grids": cfg.grid_spec(),
    }


def _lattice_at_phi(base: LatticeParams, phi: float) -> LatticeParams:
    return LatticeParams(J_AA=base.J_AA, J_AB=base.J_AB, phi=phi,
                         omega_B=base.omega_B)


def _run_bands(cfg: RunConfig, threads: int) -> Dataset:
    ks = cfg.grids["k"]
    phis = cfg.grids.get("phi")
    if phis is None:
        phis = np.array([cfg.lattice.phi])
    columns = ["phi[rad]", "k[rad]", "omega_u[E]", "omega_l[E]"]
    if cfg.couplings:
        columns += [f"G_u_{cfg.couplings}", f"G_l_{cfg.couplings}"]
    rows = []
    for phi in phis:
        p = _lattice_at_phi(cfg.lattice, float(phi))
        wu, wl = band_energies(ks, p)
        for i, k in enumerate(ks):
            row = [p.phi, float(k), float(wu[i]), float(wl[i])]
            if cfg.couplings:
                gu, gl = band_coupling(float(k), cfg.couplings, p)
                row += [gu, gl]
            rows.append(tuple(row))
    return Dataset(columns, rows, _metadata(cfg))


def _run_selfenergy(cfg: RunConfig, threads: int) -> Dataset:
    em = cfg.emitters[0]
    p = cfg.lattice
    columns = [
        "delta[E]",
        "re_sigma_A[E]", "im_sigma_A[E]", "gamma_A[E]",
        "re_sigma_B[E]", "im_sigma_B[E]", "gamma_B[E]",
    ]
    rows = []
    for delta in cfg.grids["delta"]:
        vals = []
        for D in ("A", "B"):
            try:
                if cfg.eta > 0.0:
                    sig = self_energy(float(delta) + 1j * cfg.eta, D, p, em.g)
                    gamma = -2.0 * sig.imag
                else:
                    sp = spectral_parameters(float(delta), D, p, em.g)
                    sig, gamma = sp.sigma, sp.decay_rate
                vals += [sig.real, sig.imag, gamma]
            except ValueError:
                # Band edge or other singular point on the grid.
                vals += [_NAN, _NAN, _NAN]
        rows.append((float(delta), *vals))
    return Dataset(columns, rows, _metadata(cfg))


def _run_decay(cfg: RunConfig, threads: int) -> Dataset:
    em = cfg.emitters[0]
    p = cfg.lattice
    if cfg.report == "channels":
        columns = ["delta[E]", "alpha", "band", "k[rad]",
                   "velocity[E]", "direction", "rate[E]"]
        rows = []
        for delta in cfg.grids["delta"]:
            try:
                chans = decay_channels(float(delta), em.D, p, em.g)
            except ValueError:
                continue
            for c in chans:
                rows.append((float(delta), c.alpha, c.band, c.k,
                             c.velocity, c.direction, c.rate))
        return Dataset(columns, rows, _metadata(cfg))

    columns = ["delta[E]", "gamma[E]", "R_L_global", "R_R_global",
               "R_L_local_a", "R_L_local_b", "single_sided"]
    rows = []
    for delta in cfg.grids["delta"]:
        try:
            rep = directionality_ratio(
                decay_channels(float(delta), em.D, p, em.g),
                float(delta), em.D)
            la = rep.R_local_L["a"]
            lb = rep.R_local_L["b"]
            rows.append((float(delta), rep.total_rate,
                         rep.R_global_L, rep.R_global_R,
                         _NAN if la is None else la,
                         _NAN if lb is None else lb,
                         int(rep.single_sided)))
        except ValueError:
            rows.append((float(delta), _NAN, _NAN, _NAN, _NAN, _NAN, 0))
    return Dataset(columns, rows, _metadata(cfg))


def _sweep_point(delta: float, phi: float, D: str, base: LatticeParams,
                 g: float, which: tuple) -> list:
    p = _lattice_at_phi(base, phi)
    try:
        rep = directionality_ratio(decay_channels(delta, D, p, g), delta, D)
    except ValueError:
        return [_NAN] * len(which)
    out = []
    for w in which:
        if w == "global":
            out.append(rep.R_global_L)
        else:
            v = rep.R_local_L[w.split("-")[1]]
            out.append(_NAN if v is None else v)
    return out


def _run_sweep(cfg: RunConfig, threads: int) -> Dataset:
    em = cfg.emitters[0]
    deltas = cfg.grids["delta"]
    phis = cfg.grids["phi"]
    names = {"global": "R_L_global", "local-a": "R_L_local_a",
             "local-b": "R_L_local_b"}
    columns = ["delta[E]", "phi[rad]"] + [names[w] for w in cfg.which]
    values = np.empty((deltas.size, phis.size, len(cfg.which)))

    def fill_column(j: int) -> None:
        phi = float(phis[j])
        for i, delta in enumerate(deltas):
            values[i, j, :] = _sweep_point(float(delta), phi, em.D,
                                           cfg.lattice, em.g, cfg.which)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_column, range(phis.size)))
    else:
        for j in range(phis.size):
            fill_column(j)

    rows = []
    for i, delta in enumerate(deltas):
        for j, phi in enumerate(phis):
            rows.append((float(delta), float(phi), *values[i, j, :]))
    return Dataset(columns, rows, _metadata(cfg))


def _run_boundstate(cfg: RunConfig, threads: int) -> Dataset:
    em = cfg.emitters[0]
    records = find_bound_states(em.delta, em.D, cfg.lattice, em.g,
                                window=cfg.window)
    if cfg.report == "wavefunction":
        columns = ["m", "energy[E]", "n", "re_c_a", "im_c_a",
                   "re_c_b", "im_c_b"]
        rows = []
        for rec in records:
            for idx, n in enumerate(rec.cells):
                rows.append((rec.m, rec.energy, int(n),
                             rec.c_a[idx].real, rec.c_a[idx].imag,
                             rec.c_b[idx].real, rec.c_b[idx].imag))
        return Dataset(columns, rows, _metadata(cfg))

    columns = ["m", "energy[E]", "ce2", "xi[cells]",
               "site_phase[rad]", "k_peak[rad]"]
    rows = []
    for rec in records:
        try:
            xi = localization_length(rec)
        except FitQualityError:
            xi = _NAN
        try:
            phase = bs_phase(rec)
        except (FitQualityError, ValueError):
            phase = _NAN
        try:
            kpk = dominant_momentum(rec)
        except ValueError:
            kpk = _NAN
        rows.append((rec.m, rec.energy, abs(rec.c_e) ** 2, xi, phase, kpk))
    return Dataset(columns, rows, _metadata(cfg))


def _run_spinmodel(cfg: RunConfig, threads: int) -> Dataset:
    delta = cfg.emitters[0].delta
    model = effective_couplings(cfg.emitters, cfg.lattice, delta)
    columns = ["i", "j", "D_i", "cell_i", "D_j", "cell_j",
               "re_J[E]", "im_J[E]", "abs_J[E]", "arg_J[rad]"]
    rows = []
    n = len(model)
    for i in range(n):
        for j in range(i + 1, n):
            Jij = model.coupling(i, j)
            ei, ej = model.emitters[i], model.emitters[j]
            rows.append((i, j, ei.D, ei.cell, ej.D, ej.cell,
                         Jij.real, Jij.imag, abs(Jij), cmath.phase(Jij)))
    return Dataset(columns, rows, _metadata(cfg))


def _run_floquet(cfg: RunConfig, threads: int) -> Dataset:
    traj = simulate_parametric_pair(cfg.coupler)
    if cfg.report == "summary":
        jeff = extract_effective_hopping(traj)
        ts = swap_time(traj)
        columns = ["re_J_eff[E]", "im_J_eff[E]", "abs_J_eff[E]",
                   "arg_J_eff[rad]", "t_swap[1/E]"]
        rows = [(jeff.real, jeff.imag, abs(jeff), cmath.phase(jeff), ts)]
        return Dataset(columns, rows, _metadata(cfg))
    columns = ["t[1/E]", "p1", "p2", "re_c1", "im_c1", "re_c2", "im_c2"]
    pops = traj.populations()
    rows = []
    for i, t in enumerate(traj.times):
        c1, c2 = traj.amplitudes[i]
        rows.append((float(t), float(pops[i, 0]), float(pops[i, 1]),
                     c1.real, c1.imag, c2.real, c2.imag))
    return Dataset(columns, rows, _metadata(cfg))


def _run_dynamics(cfg: RunConfig, threads: int) -> Dataset:
    H = build_hamiltonian(cfg.lattice, cfg.n_cells, cfg.emitters,
                          boundary=cfg.boundary)
    psi0 = emitter_excitation(H, 0)
    times = cfg.grids["t"]
    traj = evolve(H, psi0, times)

    if cfg.report == "populations":
        m = len(cfg.emitters)
        columns = ["t[1/E]"] + [f"P_e{j}" for j in range(m)] + ["photon"]
        rows = []
        for i, t in enumerate(times):
            state = traj.states[i]
            pe = [abs(state[H.emitter_index(j)]) ** 2 for j in range(m)]
            rows.append((float(t), *pe, 1.0 - sum(pe)))
        return Dataset(columns, rows, _metadata(cfg))

    if cfg.report == "profile":
        columns = ["t[1/E]", "n", "p_a", "p_b"]
        rows = []
        for i, t in enumerate(times):
            pa, pb = photon_populations(traj.states[i], H)
            for n in range(cfg.n_cells):
                rows.append((float(t), n, float(pa[n]), float(pb[n])))
        return Dataset(columns, rows, _metadata(cfg))

    origin = cfg.emitters[0].cell
    columns = ["t[1/E]", "left", "right", "left_a", "right_a",
               "left_b", "right_b"]
    rows = []
    for i, t in enumerate(times):
        try:
            fr = directional_fractions(H, traj.states[i], origin=origin,
                                       exclusion=cfg.exclusion)
            rows.append((float(t), fr.left, fr.right,
                         _NAN if fr.left_a is None else fr.left_a,
                         _NAN if fr.right_a is None else fr.right_a,
                         _NAN if fr.left_b is None else fr.left_b,
                         _NAN if fr.right_b is None else fr.right_b))
        except ValueError:
            rows.append((float(t), _NAN, _NAN, _NAN, _NAN, _NAN, _NAN))
    return Dataset(columns, rows, _metadata(cfg))


_RUNNERS = {
    "bands": _run_bands,
    "selfenergy": _run_selfenergy,
    "decay": _run_decay,
    "sweep": _run_sweep,
    "boundstate": _run_boundstate,
    "spinmodel": _run_spinmodel,
    "floquet": _run_floquet,
    "dynamics": _run_dynamics,
}


def _error_record(exc: Exception) -> str:
    return json.dumps(
        {"error": {"type": type(exc).__name__, "message": str(exc)}},
        sort_keys=True,
    )


def _resolve_threads(arg: int | None) -> int:
    if arg is not None:
        n = arg
    else:
        env = os.environ.get(_ENV_THREADS)
        if env is None:
            return 1
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(
                f"{_ENV_THREADS} must be an integer, got {env!r}")
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sawtooth-qed",
        description="Quantum optics of emitters coupled to a photonic "
                    "sawtooth lattice: batch analysis runner.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True,
                        help="path to a JSON run configuration")
    parser.add_argument("--out", help="output file (overrides config)")
    parser.add_argument("--format", choices=("csv", "json"), dest="fmt",
                        help="output format (overrides config)")
    parser.add_argument("--threads", type=int,
                        help=f"worker threads for sweeps "
                             f"(default ${_ENV_THREADS} or 1)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if cfg.command != args.command:
            raise ConfigError(
                f"config is for command {cfg.command!r}, "
                f"invoked as {args.command!r}")
        threads = _resolve_threads(args.threads)
    except ConfigError as exc:
        print(_error_record(exc), file=sys.stderr)
        return 2

    fmt = args.fmt or cfg.output_format
    out = args.out or cfg.output_path or f"{cfg.command}.{fmt}"

    try:
        dataset = _RUNNERS[cfg.command](cfg, threads)
        export(dataset, out, fmt)
    except Exception as exc:  # numerical failure inside a validated run
        print(_error_record(exc), file=sys.stderr)
        return 1

    print(f"wrote {out} ({len(dataset.rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
