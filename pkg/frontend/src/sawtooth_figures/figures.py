"""Drawing routines, one per figure id.

Each function takes the validated column dict for its dataset plus the
style mapping and returns a ready :class:`matplotlib.figure.Figure`.
All routines tolerate empty datasets (they produce labeled, axes-only
figures) and never modify the input arrays.
"""

from __future__ import annotations

import math

import numpy as np
import matplotlib.figure as mfigure
from matplotlib import colormaps
from matplotlib.colors import LinearSegmentedColormap, PowerNorm

__all__ = ["DRAWERS"]


def _figure(style: dict, default_size: tuple[float, float]) -> mfigure.Figure:
    size = style.get("figsize", default_size)
    return mfigure.Figure(figsize=tuple(size), layout="constrained")


def _recenter_ring(n: np.ndarray) -> np.ndarray:
    """Map ring cell indices 0..N-1 to centered offsets around the origin.

    Exported dynamics profiles index the ring with the source at cell 0,
    so indices above N/2 are really cells to its left.
    """
    if n.size == 0:
        return n
    N = int(n.max()) + 1
    half = N // 2
    return ((n.astype(int) + half) % N) - half


def _pivot(x: np.ndarray, y: np.ndarray, z: np.ndarray):
    """Long-form (x, y, z) triples -> sorted axes plus masked 2D grid."""
    xu = np.unique(x)
    yu = np.unique(y)
    grid = np.full((yu.size, xu.size), np.nan)
    ix = np.searchsorted(xu, x)
    iy = np.searchsorted(yu, y)
    grid[iy, ix] = z
    return xu, yu, np.ma.masked_invalid(grid)


def _heatmap(ax, x, y, z, *, cmap, vmin=None, vmax=None, norm=None):
    if x.size == 0 or y.size == 0:
        return None
    if norm is not None:
        return ax.pcolormesh(x, y, z, cmap=cmap, norm=norm, shading="nearest")
    return ax.pcolormesh(
        x, y, z, cmap=cmap, vmin=vmin, vmax=vmax, shading="nearest"
    )


# A dark-green -> red sequence for the band-structure phase sweep.
_PHASE_CMAP = LinearSegmentedColormap.from_list(
    "phase_sweep", ["#1b5e20", "#7cb342", "#fdd835", "#fb8c00", "#d32f2f"]
)


def draw_fig1c(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.0, 4.2))
    ax = fig.add_subplot()
    phis = np.unique(data["phi[rad]"])
    span = (phis.max() - phis.min()) or 1.0 if phis.size else 1.0
    for phi in phis:
        sel = data["phi[rad]"] == phi
        k = data["k[rad]"][sel]
        order = np.argsort(k)
        color = _PHASE_CMAP((phi - phis.min()) / span)
        label = f"$\\phi={phi / math.pi:.2f}\\pi$"
        ax.plot(k[order], data["omega_u[E]"][sel][order], "-", color=color,
                lw=1.6, label=label)
        ax.plot(k[order], data["omega_l[E]"][sel][order], "--", color=color,
                lw=1.6)
    ax.set_xlabel("$k$ [rad]")
    ax.set_ylabel("$\\omega_{u/l}(k)$ [$J_{AA}$]")
    ax.set_title("Photonic bands (upper solid, lower dashed)")
    if phis.size:
        ax.legend(fontsize=8, ncols=2)
        ax.set_xlim(data["k[rad]"].min(), data["k[rad]"].max())
    return fig


def draw_fig2a(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.0, 5.4))
    axes = fig.subplots(2, 1, sharex=True, sharey=True)
    n = _recenter_ring(data["n"])
    cmap = style.get("cmap", "inferno")
    for ax, col, tag in ((axes[0], "p_a", "a"), (axes[1], "p_b", "b")):
        x, y, z = _pivot(n, data["t[1/E]"], data[col])
        mesh = _heatmap(ax, x, y, z, cmap=cmap, norm=PowerNorm(0.5, vmin=0.0))
        if mesh is not None:
            fig.colorbar(mesh, ax=ax, label=f"$\\langle {tag}_n^\\dagger {tag}_n\\rangle$")
        ax.set_ylabel("$t$ [$1/J_{AA}$]")
        ax.axvline(0.0, color="w", lw=0.5, ls=":", alpha=0.6)
    axes[1].set_xlabel("cell $n$ (source at 0)")
    axes[0].set_title("Emitted photon in real space over time")
    return fig


def draw_fig2b(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (5.6, 4.4))
    ax = fig.add_subplot()
    x, y, z = _pivot(data["delta[E]"], data["phi[rad]"], data["R_L_global"])
    cmap = colormaps[style.get("cmap", "viridis")].copy()
    cmap.set_bad("0.85")
    mesh = _heatmap(ax, x, y, z, cmap=cmap, vmin=0.5, vmax=1.0)
    if mesh is not None:
        fig.colorbar(mesh, ax=ax, label="$R_L$ (global)")
    ax.set_xlabel("$\\Delta$ [$J_{AA}$]")
    ax.set_ylabel("$\\phi$ [rad]")
    ax.set_title("Left directionality of band emission")
    return fig


def draw_fig3(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.2, 5.6))
    axes = fig.subplots(2, 1)
    m_sel = float(style.get("m", 0))
    sel = data["m"] == m_sel
    n = data["n"][sel]
    ca = data["re_c_a"][sel] + 1j * data["im_c_a"][sel]
    cb = data["re_c_b"][sel] + 1j * data["im_c_b"][sel]

    k = np.linspace(-math.pi, math.pi, 721)
    for c, label, color in ((ca, "$|c_a(k)|^2$", "tab:blue"),
                            (cb, "$|c_b(k)|^2$", "tab:red")):
        if n.size:
            amp = np.exp(-1j * np.outer(k, n)) @ c / math.sqrt(2.0 * math.pi)
            axes[0].plot(k, np.abs(amp) ** 2, color=color, lw=1.4, label=label)
    axes[0].set_xlabel("$k$ [rad]")
    axes[0].set_ylabel("momentum density")
    axes[0].set_title(f"Gap-localized photon state (branch m={int(m_sel)})")
    if n.size:
        axes[0].legend(fontsize=8)
        axes[0].set_xlim(-math.pi, math.pi)

    axes[1].plot(n, np.abs(cb), "r--", lw=1.2, label="$|c_b|$")
    axes[1].plot(n, cb.real, "k.", ms=3, label="Re $c_b$")
    axes[1].plot(n, cb.imag, ".", color="tab:green", ms=3, label="Im $c_b$")
    axes[1].set_xlabel("cell $n$")
    axes[1].set_ylabel("$c_b(n)$")
    if n.size:
        axes[1].legend(fontsize=8, ncols=3)
    return fig


def draw_sm1(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.0, 4.2))
    ax = fig.add_subplot()
    delta = data["delta[E]"]
    for d_tag, color in (("A", "tab:blue"), ("B", "tab:red")):
        ax.plot(delta, data[f"gamma_{d_tag}[E]"], "-", color=color, lw=1.6,
                label=f"$\\gamma_{d_tag}$")
        ax.plot(delta, data[f"re_sigma_{d_tag}[E]"], "--", color=color, lw=1.2,
                label=f"$\\delta\\omega_{d_tag}$")
    # Band limits show up in the data as the decay rate switching on/off.
    both = np.abs(data["gamma_A[E]"]) + np.abs(data["gamma_B[E]"])
    inside = both > 0.0
    for i in np.nonzero(inside[1:] != inside[:-1])[0]:
        ax.axvline(0.5 * (delta[i] + delta[i + 1]), color="k", lw=0.8)
    ax.set_xlabel("$\\Delta$ [$J_{AA}$]")
    ax.set_ylabel("rate / shift [$J_{AA}$]")
    ax.set_title("Decay rate (solid) and energy shift (dashed)")
    if delta.size:
        ax.legend(fontsize=8, ncols=2)
        ax.set_xlim(delta.min(), delta.max())
    return fig


def draw_sm2(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.0, 5.4))
    axes = fig.subplots(2, 1, sharex=True)
    k = data["k[rad]"]
    order = np.argsort(k)
    axes[0].plot(k[order], data["omega_u[E]"][order], "-", color="tab:purple",
                 lw=1.6, label="$\\omega_u$")
    axes[0].plot(k[order], data["omega_l[E]"][order], "--", color="tab:purple",
                 lw=1.6, label="$\\omega_l$")
    axes[0].set_ylabel("$\\omega(k)$ [$J_{AA}$]")
    axes[1].plot(k[order], data["G_u_A"][order], "-", color="tab:blue",
                 lw=1.6, label="$G_{u,A}$")
    axes[1].plot(k[order], data["G_l_A"][order], "--", color="tab:red",
                 lw=1.6, label="$G_{l,A}$")
    axes[1].set_xlabel("$k$ [rad]")
    axes[1].set_ylabel("band coupling weight")
    axes[0].set_title("Bands and A-sublattice coupling weights")
    if k.size:
        for ax in axes:
            ax.legend(fontsize=8)
        axes[1].set_xlim(k.min(), k.max())
    return fig


def draw_sm3(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (8.4, 3.8))
    axes = fig.subplots(1, 2, sharey=True)
    cmap = colormaps[style.get("cmap", "viridis")].copy()
    cmap.set_bad("0.85")
    panels = (
        (axes[0], "R_L_local_a", 0.0, 0.5, "$R_{L,a}$"),
        (axes[1], "R_L_local_b", 0.5, 1.0, "$R_{L,b}$"),
    )
    for ax, col, vmin, vmax, label in panels:
        x, y, z = _pivot(data["delta[E]"], data["phi[rad]"], data[col])
        mesh = _heatmap(ax, x, y, z, cmap=cmap, vmin=vmin, vmax=vmax)
        if mesh is not None:
            fig.colorbar(mesh, ax=ax, label=label)
        ax.set_xlabel("$\\Delta$ [$J_{AA}$]")
    axes[0].set_ylabel("$\\phi$ [rad]")
    fig.suptitle("Sublattice-resolved left directionality")
    return fig


def draw_sm4(data: dict, style: dict) -> mfigure.Figure:
    fig = _figure(style, (6.0, 4.0))
    ax = fig.add_subplot()
    n = _recenter_ring(data["n"])
    order = np.argsort(n)
    t_label = f"$t={data['t[1/E]'][0]:g}/J_{{AA}}$" if n.size else ""
    ax.plot(n[order], data["p_a"][order], "-", color="tab:blue", lw=1.2,
            label="$\\langle a_n^\\dagger a_n\\rangle$")
    ax.plot(n[order], data["p_b"][order], "-", color="tab:red", lw=1.2,
            label="$\\langle b_n^\\dagger b_n\\rangle$")
    ax.set_xlabel("cell $n$ (source at 0)")
    ax.set_ylabel("photon population")
    ax.set_title(f"Emitted wavepacket {t_label}".rstrip())
    if n.size:
        ax.legend(fontsize=8)
    return fig


DRAWERS = {
    "fig1c": draw_fig1c,
    "fig2a": draw_fig2a,
    "fig2b": draw_fig2b,
    "fig3": draw_fig3,
    "sm1": draw_sm1,
    "sm2": draw_sm2,
    "sm3": draw_sm3,
    "sm4": draw_sm4,
}
