"""Markovian decay channels and directionality ratios.

A resonant emitter decays into the lattice modes at its detuning.  Each
resonant root q contributes one channel per photon sublattice,

    Gamma^D_alpha(q) = g^2 G_D(q) G_alpha(q) / |v(q)|,

with G_X the band weight of sublattice X at q and v the group velocity.
Summing alpha gives g^2 G_D / |v| (the band weights close to 1), and
summing over all roots recovers the total rate gamma_D = -2 Im Sigma, which
is the sum rule the tests pin at 1e-8.  Ratios group channels by the sign
of v: the global ratio over everything, the local ones within a single
photon sublattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bloch import (LatticeParams, band_coupling, band_extrema,
                    resonant_momenta)

_SUBLATTICE_OF = {"a": "A", "b": "B"}


class ChannelDivergenceError(ValueError):
    """A resonant root sits at a band edge where 1/|v| diverges."""


@dataclass(frozen=True)
class DecayChannel:
    """One emission channel: photon sublattice alpha into root q."""

    alpha: str            # photon sublattice, 'a' or 'b'
    band: str             # 'u' or 'l'
    k: float
    velocity: float
    direction: str        # 'L' or 'R'
    rate: float


@dataclass(frozen=True)
class DirectionalityReport:
    """Channel decomposition with global and sublattice-resolved ratios.

    single_sided marks detunings whose roots all move one way (then the
    populated side's ratio is pinned at 1).  Local ratios are None when
    that sublattice receives no weight.
    """

    delta: float
    D: str
    channels: tuple
    total_rate: float
    R_global_L: float
    R_global_R: float
    R_local_L: dict
    R_local_R: dict
    single_sided: bool = field(default=False)


def decay_channels(delta: float, D: str, p: LatticeParams, g: float):
    """All emission channels of a D emitter at in-band detuning delta.

    Roots are collected from every band containing delta (their channel
    rates add).  A root with |v| < 1e-10 x energy scale marks a band-edge
    detuning and raises ChannelDivergenceError.
    """
    if D not in ("A", "B"):
        raise ValueError("D must be 'A' or 'B'")
    edges = band_extrema(p)
    channels = []
    for band in ("u", "l"):
        lo, hi = edges.band_interval(band)
        if not lo < delta < hi:
            continue
        for mode in resonant_momenta(delta, band, p):
            if abs(mode.velocity) < 1e-10 * p.hopping_scale:
                raise ChannelDivergenceError(
                    "resonant root at k=%.6f has vanishing group velocity"
                    % mode.k)
            gu_D, gl_D = band_coupling(mode.k, D, p)
            g_D = gu_D if band == "u" else gl_D
            for alpha in ("a", "b"):
                gu_al, gl_al = band_coupling(
                    mode.k, _SUBLATTICE_OF[alpha], p)
                g_al = gu_al if band == "u" else gl_al
                channels.append(DecayChannel(
                    alpha=alpha, band=band, k=mode.k,
                    velocity=mode.velocity, direction=mode.direction,
                    rate=g * g * g_D * g_al / abs(mode.velocity)))
    if not channels:
        raise ValueError("delta is not inside any band")
    return tuple(channels)


def directionality_ratio(channels, delta: float | None = None,
                         D: str | None = None) -> DirectionalityReport:
    """Group channel rates by direction into global and local ratios."""
    channels = tuple(channels)
    total = sum(c.rate for c in channels)
    left = sum(c.rate for c in channels if c.direction == "L")
    right = total - left
    single = (left == 0.0) or (right == 0.0)
    loc_L, loc_R = {}, {}
    for alpha in ("a", "b"):
        sub = [c for c in channels if c.alpha == alpha]
        s_tot = sum(c.rate for c in sub)
        if s_tot == 0.0:
            loc_L[alpha] = loc_R[alpha] = None
            continue
        s_left = sum(c.rate for c in sub if c.direction == "L")
        loc_L[alpha] = s_left / s_tot
        loc_R[alpha] = 1.0 - s_left / s_tot
    return DirectionalityReport(
        delta=float("nan") if delta is None else delta,
        D="" if D is None else D,
        channels=channels, total_rate=total,
        R_global_L=left / total, R_global_R=right / total,
        R_local_L=loc_L, R_local_R=loc_R,
        single_sided=single)


def directionality(delta: float, D: str, p: LatticeParams,
                   g: float) -> DirectionalityReport:
    """decay_channels + directionality_ratio in one call."""
    return directionality_ratio(decay_channels(delta, D, p, g), delta, D)


def total_rate(delta: float, D: str, p: LatticeParams, g: float) -> float:
    """Markovian decay rate as the sum of all channel rates."""
    return sum(c.rate for c in decay_channels(delta, D, p, g))


def sweep_map(delta_grid, phi_grid, D: str, p: LatticeParams, g: float,
              which: str = "global"):
    """R_L over a (delta, phi) grid; NaN marks cells with no resonance.

    which: 'global' for R^D_L, 'local-a'/'local-b' for the sublattice-
    resolved ratios.  Rows index delta, columns phi; p supplies J_AA, J_AB
    and omega_B while phi comes from the grid.
    """
    if which not in ("global", "local-a", "local-b"):
        raise ValueError("which must be 'global', 'local-a' or 'local-b'")
    delta_grid = np.asarray(delta_grid, float)
    phi_grid = np.asarray(phi_grid, float)
    out = np.full((delta_grid.size, phi_grid.size), np.nan)
    for j, phi in enumerate(phi_grid):
        pj = LatticeParams(p.J_AA, p.J_AB, float(phi), p.omega_B)
        for i, d in enumerate(delta_grid):
            try:
                rep = directionality(float(d), D, pj, g)
            except (ValueError, ChannelDivergenceError):
                continue
            if which == "global":
                out[i, j] = rep.R_global_L
            else:
                val = rep.R_local_L[which[-1]]
                out[i, j] = np.nan if val is None else val
    return out
