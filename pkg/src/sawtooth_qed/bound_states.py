"""Photon bound states in the band gaps.

An emitter with bare detuning delta seats one bound state per gap wherever
F_D(E) = E - delta - Sigma_D(E) changes sign.  F_D is strictly increasing on
every gap (Sigma_D is a sum of -g^2 |w_k|^2 / (omega_k - E) terms), so each
gap holds at most one root and bracketed bisection is safe.  In the outer
gaps Sigma_D diverges at the band edge, which forces a sign change and a
root for every (delta, phi, g); in the middle gap existence depends on the
edge limits, decided here from the closed-form self-energy rather than a
hard-coded inequality.

Wavefunctions come from residue evaluation of the lattice Green function at
the bound-state energy: a single pole y_in inside the unit circle makes the
photon tail exactly geometric, c(n) ~ y_in^n for n >= 1, with conjugate
poles covering n <= -1.  Localization length and per-cell phase therefore
read off the modulus and argument of y_in; both are still extracted by
fitting the coefficients, which keeps the extractors honest for data that
did not come from this module.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bloch import LatticeParams, band_extrema, wrap_angle
from .greens import _contour_value, pole_locations, self_energy

# Offset used to pull root brackets off the band edges, in units of J_AA.
_EDGE_EPS_FACTOR = 1e-9
# Outer-gap search depth in units of max(J_AA, J_AB).
_SEARCH_SPAN = 20.0
# Probe offsets for classifying an edge limit as divergent vs finite.
_PROBE_FAR = 1e-5
_PROBE_NEAR = 1e-7

# Green-function matrix-element pair feeding each photon sublattice, keyed
# by the emitter sublattice.  First entry fills c_a, second fills c_b.
_PAIR_FOR = {"A": ("AA", "AB"), "B": ("BA", "BB")}


class FitQualityError(ValueError):
    """Tail coefficients are not exponential to within the fit threshold."""


@dataclass(frozen=True)
class GapRegion:
    """One spectral gap, truncated to a finite search interval.

    m = -1 sits below the lower band, m = 0 between the bands, m = +1 above
    the upper band.  Outer regions extend _SEARCH_SPAN * max(J) beyond the
    edge; the middle region is the exact open gap.
    """

    m: int
    lo: float
    hi: float

    def __contains__(self, energy: float) -> bool:
        return self.lo < energy < self.hi


@dataclass(frozen=True)
class ExistenceReport:
    """Outcome of the middle-gap existence test with edge diagnostics.

    F_lo and F_hi are F_D evaluated a hair inside each gap edge; the
    divergent flags classify whether Sigma_D blows up at that edge (probe
    ratio test).  Truthiness is the existence verdict.
    """

    exists: bool
    F_lo: float
    F_hi: float
    lower_edge_divergent: bool
    upper_edge_divergent: bool
    sigma_lo: float
    sigma_hi: float

    def __bool__(self) -> bool:
        return self.exists


@dataclass
class BoundStateRecord:
    """Bound state with its photonic wavefunction over a window of cells.

    cells holds the integer cell offsets n (symmetric around the emitter),
    c_a/c_b the photon coefficients on each sublattice, c_e the emitter
    amplitude fixed real positive by normalization.  xi is the localization
    length in cells, site_phase the per-cell phase in (-pi, pi].
    """

    m: int
    D: str
    energy: float
    delta: float
    g: float
    p: LatticeParams
    c_e: float
    cells: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    xi: float = field(default=float("nan"))
    site_phase: float = field(default=float("nan"))
    y_in: complex = field(default=0j)


def gap_regions(p: LatticeParams):
    """Return the open spectral gaps as search intervals, lowest first.

    The middle region is omitted when the bands touch (|phi| = pi/2).
    """
    edges = band_extrema(p)
    l_lo, l_hi = edges.band_interval("l")
    u_lo, u_hi = edges.band_interval("u")
    span = _SEARCH_SPAN * max(p.J_AA, p.J_AB)
    regions = [GapRegion(-1, l_lo - span, l_lo)]
    if u_lo - l_hi > 1e-12 * p.hopping_scale:
        regions.append(GapRegion(0, l_hi, u_lo))
    regions.append(GapRegion(1, u_hi, u_hi + span))
    return tuple(regions)


def _gap_for_energy(energy: float, p: LatticeParams) -> int:
    for region in gap_regions(p):
        if energy in region:
            return region.m
    raise ValueError("energy does not lie in any band gap")


def _F(E: float, delta: float, D: str, p: LatticeParams, g: float) -> float:
    # Sigma is purely real at real energies in a gap; .real discards noise.
    return E - delta - self_energy(complex(E), D, p, g).real


def bound_state_energy(gap: GapRegion, delta: float, D: str,
                       p: LatticeParams, g: float):
    """Unique root of F_D in the gap, or None when F has no sign change.

    Brackets stop _EDGE_EPS_FACTOR * J_AA short of each band edge; the
    divergence of Sigma_D at the outer edges guarantees the sign change
    appears arbitrarily close to them.
    """
    eps = _EDGE_EPS_FACTOR * p.J_AA
    lo = gap.lo + (eps if gap.m >= 0 else 0.0)
    hi = gap.hi - (eps if gap.m <= 0 else 0.0)
    if not lo < hi:
        return None
    f_lo = _F(lo, delta, D, p, g)
    f_hi = _F(hi, delta, D, p, g)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0 and gap.m != 0:
        # F is strictly increasing on a gap (Sigma' < 0), so each outer
        # gap holds exactly one root; a detuning far from the gap pushes
        # it inside the edge standoff, where the divergence of Sigma has
        # not taken over yet.  Shrink the standoff geometrically until
        # the sign change reappears.
        while eps > 1e-15 * p.J_AA and f_lo * f_hi > 0.0:
            eps *= 1e-2
            try:
                if gap.m == 1:
                    lo = gap.lo + eps
                    f_lo = _F(lo, delta, D, p, g)
                else:
                    hi = gap.hi - eps
                    f_hi = _F(hi, delta, D, p, g)
            except ValueError:
                return None
    if f_lo * f_hi > 0.0:
        return None
    root = brentq(lambda E: _F(E, delta, D, p, g), lo, hi,
                  xtol=1e-15, rtol=8.9e-16)
    if min(abs(root - gap.lo), abs(root - gap.hi)) < 1e-10:
        warnings.warn(
            "bound-state energy within 1e-10 of a band edge; residue "
            "evaluation loses precision there", stacklevel=2)
    return root


def _edge_probe(edge: float, side: int, D: str, p: LatticeParams, g: float):
    """Sigma_D just inside a gap edge plus a divergence classification.

    side = +1 probes above the edge, -1 below.  The limit is called
    divergent when |Sigma| grows by more than 3x as the probe offset
    shrinks from _PROBE_FAR to _PROBE_NEAR (square-root van Hove growth
    gives 10x; finite limits give ~1x).
    """
    scale = p.hopping_scale
    s_far = self_energy(complex(edge + side * _PROBE_FAR * scale), D, p, g).real
    s_near = self_energy(complex(edge + side * _PROBE_NEAR * scale), D, p, g).real
    divergent = abs(s_near) > 3.0 * abs(s_far)
    return s_near, divergent


def bound_state_exists(m: int, D: str, delta: float, p: LatticeParams,
                       g: float) -> ExistenceReport:
    """Decide middle-gap existence from the signs of F at the gap edges.

    Outer gaps always hold a state, so only m = 0 is accepted.  F is
    increasing, hence a root exists iff F < 0 at the lower edge and F > 0
    at the upper edge; edges where Sigma_D diverges settle their sign
    automatically.
    """
    if m != 0:
        raise ValueError("existence is only in question for the middle gap")
    regions = {r.m: r for r in gap_regions(p)}
    if 0 not in regions:
        raise ValueError("middle gap is closed at |phi| = pi/2")
    gap = regions[0]
    eps = _EDGE_EPS_FACTOR * p.J_AA
    f_lo = _F(gap.lo + eps, delta, D, p, g)
    f_hi = _F(gap.hi - eps, delta, D, p, g)
    sig_lo, div_lo = _edge_probe(gap.lo, +1, D, p, g)
    sig_hi, div_hi = _edge_probe(gap.hi, -1, D, p, g)
    return ExistenceReport(
        exists=bool(f_lo < 0.0 < f_hi),
        F_lo=f_lo, F_hi=f_hi,
        lower_edge_divergent=div_lo, upper_edge_divergent=div_hi,
        sigma_lo=sig_lo, sigma_hi=sig_hi)


def _photon_coefficients(energy: float, D: str, p: LatticeParams,
                         cells: np.ndarray):
    """Unnormalized photon amplitudes g=1, c_e=1 over the given cells."""
    pair_a, pair_b = _PAIR_FOR[D]
    z = complex(energy)
    u_a = np.array([_contour_value(z, pair_a, int(n), p) for n in cells])
    u_b = np.array([_contour_value(z, pair_b, int(n), p) for n in cells])
    return u_a, u_b


def bound_state_wavefunction(energy: float, D: str, p: LatticeParams,
                             g: float, window: int | None = None,
                             delta: float | None = None) -> BoundStateRecord:
    """Assemble a BoundStateRecord by residue evaluation at the given energy.

    The window half-width defaults to 30 localization lengths (at least 12
    cells, at most 4000: the tails beyond the window are closed analytically
    in the norm, so very weakly bound states do not need proportionally
    wide arrays).  An explicit window below 10 xi draws a truncation
    warning.  delta is only stored on the record; pass it when known,
    otherwise it is reconstructed from F_D(E) = 0.
    """
    if D not in _PAIR_FOR:
        raise ValueError("D must be 'A' or 'B'")
    m = _gap_for_energy(energy, p)
    poles = pole_locations(complex(energy), p)
    y_in = poles.y_min
    xi0 = -1.0 / math.log(abs(y_in))
    if window is None:
        window = max(12, min(math.ceil(30.0 * xi0), 4000))
    elif window < 10.0 * xi0:
        warnings.warn(
            "window of %d cells is below 10 localization lengths (xi = %.3g);"
            " normalization will be truncated" % (window, xi0), stacklevel=2)
    cells = np.arange(-window, window + 1)
    u_a, u_b = _photon_coefficients(energy, D, p, cells)
    norm_sq = 1.0 + g * g * float(np.sum(np.abs(u_a) ** 2 + np.abs(u_b) ** 2))
    # Close the geometric tails beyond the window analytically.
    q = abs(y_in) ** 2
    tail = q / (1.0 - q) * (abs(u_a[0]) ** 2 + abs(u_a[-1]) ** 2
                            + abs(u_b[0]) ** 2 + abs(u_b[-1]) ** 2)
    norm_sq += g * g * tail
    c_e = 1.0 / math.sqrt(norm_sq)
    if delta is None:
        delta = energy - self_energy(complex(energy), D, p, g).real
    record = BoundStateRecord(
        m=m, D=D, energy=energy, delta=delta, g=g, p=p,
        c_e=c_e, cells=cells,
        c_a=g * c_e * u_a, c_b=g * c_e * u_b, y_in=y_in)
    record.xi = localization_length(record)
    record.site_phase = bs_phase(record)
    return record


def _tail_series(record: BoundStateRecord):
    """Tail data split by sublattice and side of the emitter.

    The state is reflection-symmetric about the emitter site, which sits a
    half cell off one sublattice's n = 0, so the four (sublattice, side)
    series share a decay rate but not an intercept.  Each entry is
    (|n|, log|c|) for cells with |n| >= 2 and |c| > 1e-12.
    """
    series = []
    for c in (record.c_a, record.c_b):
        for side in (record.cells >= 2, record.cells <= -2):
            keep = side & (np.abs(c) > 1e-12)
            if np.count_nonzero(keep) >= 2:
                series.append((np.abs(record.cells[keep]).astype(float),
                               np.log(np.abs(c[keep]))))
    return series


def localization_length(record: BoundStateRecord) -> float:
    """Least-squares localization length from the tails of log|c(n)|.

    Pooled regression: one common slope across the four (sublattice, side)
    tail series, a free intercept per series.  A root-mean-square within-
    series residual above 1e-6 raises FitQualityError.
    """
    series = _tail_series(record)
    if not series:
        raise FitQualityError("no usable tail cells")
    sxx = sxy = 0.0
    for x, y in series:
        dx = x - x.mean()
        sxx += float(dx @ dx)
        sxy += float(dx @ (y - y.mean()))
    if sxx == 0.0:
        raise FitQualityError("degenerate tail window")
    slope = sxy / sxx
    ss = n_pts = 0.0
    for x, y in series:
        resid = (y - y.mean()) - slope * (x - x.mean())
        ss += float(resid @ resid)
        n_pts += x.size
    rms = math.sqrt(ss / n_pts)
    if rms > 1e-6:
        raise FitQualityError(
            "tail is not exponential (rms log-residual %.3g)" % rms)
    if slope >= 0:
        raise FitQualityError("tail does not decay")
    return -1.0 / slope


def bs_phase(record: BoundStateRecord) -> float:
    """Per-cell phase: circular mean of arg(c(n+1)/c(n)) over the tail.

    Ratios are taken within each sublattice and on each side of the emitter
    separately (both sides advance with the same phase), cells with
    |c| < 1e-12 are excluded, and the result is wrapped to (-pi, pi].
    """
    acc = 0j
    for c in (record.c_a, record.c_b):
        for side in (record.cells >= 2, record.cells <= -2):
            vals = c[side]
            ratios = vals[1:] / vals[:-1]
            ratios = ratios[np.abs(vals[1:]) > 1e-12]
            if ratios.size:
                acc += np.sum(ratios / np.abs(ratios))
    if acc == 0:
        raise ValueError("no usable tail cells for phase extraction")
    return wrap_angle(cmath.phase(acc))


def momentum_density(record: BoundStateRecord, sublattice: str = "b",
                     k: np.ndarray | None = None):
    """|c_alpha(k)|^2 of the photonic component on a momentum grid.

    Direct Fourier sum over the record window, normalized so the density
    integrates to the photonic weight of that sublattice.  Returns (k,
    density).
    """
    if k is None:
        k = np.linspace(-np.pi, np.pi, 4097)
    c = record.c_b if sublattice == "b" else record.c_a
    # Evaluate the phase matrix in row blocks so the footprint stays
    # bounded for wide windows.
    block = max(1, 4_000_000 // max(1, record.cells.size))
    ck = np.empty(k.size, dtype=complex)
    for start in range(0, k.size, block):
        kk = k[start:start + block]
        ck[start:start + block] = np.exp(-1j * np.outer(kk, record.cells)) @ c
    ck /= math.sqrt(2.0 * math.pi)
    return k, np.abs(ck) ** 2


def dominant_momentum(record: BoundStateRecord, sublattice: str = "b") -> float:
    """Peak position of the momentum density, refined by quadratic fit.

    This is the carrier momentum of the bound state; near a band edge it
    tracks the edge momentum more faithfully than the tail phase, whose
    argument is shifted by the finite binding energy.
    """
    k, dens = momentum_density(record, sublattice)
    i = int(np.argmax(dens))
    if 0 < i < k.size - 1:
        # Quadratic refinement through the three points around the maximum.
        y0, y1, y2 = dens[i - 1], dens[i], dens[i + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom != 0.0:
            return float(k[i] + 0.5 * (y0 - y2) / denom * (k[1] - k[0]))
    return float(k[i])


def find_bound_states(delta: float, D: str, p: LatticeParams, g: float,
                      window: int | None = None):
    """All bound states for one emitter: list of BoundStateRecord by gap."""
    records = []
    for gap in gap_regions(p):
        energy = bound_state_energy(gap, delta, D, p, g)
        if energy is None:
            continue
        records.append(
            bound_state_wavefunction(energy, D, p, g, window=window,
                                     delta=delta))
    return records
