"""Momentum-space description of the photonic sawtooth lattice.

The lattice has two sites per cell: an ``a`` chain with direct hopping
J_AA and a ``b`` site coupled to the two neighbouring ``a`` sites with
strength J_AB, one of the two links carrying a tunable phase phi.  This
module provides the 2x2 Bloch Hamiltonian, the two photonic bands, the
diagonalizing unitary, group velocities, band extrema and the resonant
momenta at a given energy.

Energies are expressed in the same unit as the hoppings (J_AA in all
shipped presets) and momenta in radians over the first Brillouin zone
(-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

TWO_PI = 2.0 * math.pi

# Relative scale below which the band splitting counts as degenerate and
# transform entries are taken from the k -> k^- limit.
_DEGENERACY_TOL = 1e-12
# One-sided offset used to evaluate that limit.
_DEGENERACY_NUDGE = 1e-9


class DegenerateDispersionError(ValueError):
    """Band-touching point where eigenvectors or velocities are ill defined."""


class TangencyError(ValueError):
    """Energy tangent to a band edge: resonant momenta have zero velocity."""


def wrap_angle(x):
    """Map an angle (scalar or array) to the interval (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(x), TWO_PI)


@dataclass(frozen=True)
class LatticeParams:
    """Static parameters of the sawtooth bath.

    J_AA : hopping along the a chain (> 0, sets the energy unit).
    J_AB : hopping between a and b sites (>= 0).
    phi  : phase on the a_{n+1} -> b_n link, normalized to (-pi, pi].
    omega_B : bare site frequency, common to both sublattices.
    N    : number of unit cells; only required by finite-lattice builds.
    """

    J_AA: float
    J_AB: float
    phi: float
    omega_B: float = 0.0
    N: int | None = None

    def __post_init__(self):
        for name in ("J_AA", "J_AB", "phi", "omega_B"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.J_AA <= 0:
            raise ValueError("J_AA must be positive")
        if self.J_AB < 0:
            raise ValueError("J_AB must be non-negative")
        object.__setattr__(self, "phi", float(wrap_angle(self.phi)))
        if self.N is not None:
            if not isinstance(self.N, (int, np.integer)) or self.N < 2:
                raise ValueError("N must be an integer >= 2 when given")

    @property
    def hopping_scale(self) -> float:
        return max(self.J_AA, self.J_AB)


@dataclass
class BlochData:
    """Diagonalization data of the Bloch Hamiltonian at one momentum.

    ``P`` has the eigenvectors as columns (upper band first); its first
    row is proportional to f(k, phi), so exp(i varphi) = f/|f|.  theta in
    [0, pi/2] is the sublattice mixing angle, with |P[0,0]| = cos(theta)
    the a-weight of the upper band.  ``degenerate`` marks band-touching
    momenta, where the entries are the limit from k -> k^-.
    """

    k: float
    omega_u: float
    omega_l: float
    f: complex
    P: np.ndarray
    theta: float
    varphi: float
    N_u: float
    N_l: float
    degenerate: bool


def offdiag_element(k, p: LatticeParams):
    """Off-diagonal Bloch matrix element f(k, phi) = -J_AB (1 + e^{-i(k+phi)})."""
    return -p.J_AB * (1.0 + np.exp(-1j * (np.asarray(k, dtype=float) + p.phi)))


def _splitting(k, p: LatticeParams):
    """Half band splitting sqrt(J_AA^2 cos^2 k + 4 J_AB^2 cos^2((k+phi)/2))."""
    c = np.cos(k)
    return np.sqrt((p.J_AA * c) ** 2 + 4.0 * p.J_AB**2 * np.cos((k + p.phi) / 2.0) ** 2)


def band_energies(k, p: LatticeParams):
    """Upper and lower band energies at momentum k (scalar or array).

    Returns
    -------
    (omega_u, omega_l) with
    omega_{u/l}(k) = omega_B - J_AA cos k +/- _splitting(k).
    """
    k = np.asarray(k, dtype=float)
    base = p.omega_B - p.J_AA * np.cos(k)
    s = _splitting(k, p)
    return base + s, base - s


def bloch_hamiltonian(k: float, p: LatticeParams) -> np.ndarray:
    """The 2x2 Bloch matrix h(k) in the (a, b) basis."""
    f = complex(offdiag_element(k, p))
    diag_a = p.omega_B - 2.0 * p.J_AA * math.cos(k)
    return np.array([[diag_a, f], [np.conj(f), p.omega_B]], dtype=complex)


def _transform_entries(k, p: LatticeParams):
    """Vectorized eigen-decomposition of h(k).

    Returns a dict of arrays: band energies, eigenvector components
    P11, P12 (a row) and P21, P22 (b row), normalizations and a
    degeneracy mask.  Degenerate momenta are nudged to k - 1e-9 so the
    entries carry the one-sided limit.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    s = _splitting(k, p)
    degenerate = s < _DEGENERACY_TOL * p.hopping_scale
    k_eff = np.where(degenerate, k - _DEGENERACY_NUDGE, k)

    f = offdiag_element(k_eff, p)
    c = np.cos(k_eff)
    s_eff = _splitting(k_eff, p)
    # Energies relative to omega_B; eigenvector of h - omega_B for
    # eigenvalue w is (f, w + 2 J_AA cos k) up to normalization.
    wu0 = -p.J_AA * c + s_eff
    wl0 = -p.J_AA * c - s_eff
    vu2 = wu0 + 2.0 * p.J_AA * c
    vl2 = wl0 + 2.0 * p.J_AA * c
    absf = np.abs(f)
    nu = 1.0 / np.sqrt(absf**2 + vu2**2)
    nl = 1.0 / np.sqrt(absf**2 + vl2**2)

    wu, wl = band_energies(k, p)
    return {
        "k": k,
        "omega_u": wu,
        "omega_l": wl,
        "f": f,
        "P11": nu * f,
        "P12": nl * f,
        "P21": nu * vu2,
        "P22": nl * vl2,
        "N_u": nu,
        "N_l": nl,
        "degenerate": degenerate,
    }


def bloch_transform(k: float, p: LatticeParams) -> BlochData:
    """Diagonalize the Bloch matrix at a single momentum.

    Columns of the returned P are the upper/lower band eigenvectors of
    h(k); at band-touching points the k -> k^- limit is returned and the
    ``degenerate`` flag is set.
    """
    e = _transform_entries(float(k), p)
    P = np.array(
        [[e["P11"][0], e["P12"][0]], [e["P21"][0], e["P22"][0]]], dtype=complex
    )
    cos_t = abs(P[0, 0])
    sin_t = abs(P[0, 1])
    f = complex(e["f"][0])
    return BlochData(
        k=float(k),
        omega_u=float(e["omega_u"][0]),
        omega_l=float(e["omega_l"][0]),
        f=f,
        P=P,
        theta=math.atan2(sin_t, cos_t),
        varphi=math.atan2(f.imag, f.real),
        N_u=float(e["N_u"][0]),
        N_l=float(e["N_l"][0]),
        degenerate=bool(e["degenerate"][0]),
    )


def group_velocity(k, band: str, p: LatticeParams):
    """d omega / dk for band 'u' or 'l' (scalar or array).

    Raises DegenerateDispersionError when k sits at a band touching,
    where the derivative is not defined.
    """
    if band not in ("u", "l"):
        raise ValueError("band must be 'u' or 'l'")
    k = np.asarray(k, dtype=float)
    s = _splitting(k, p)
    if np.any(s < _DEGENERACY_TOL * p.hopping_scale):
        raise DegenerateDispersionError(
            "group velocity undefined at a band-touching momentum"
        )
    ds2 = -p.J_AA**2 * np.sin(2.0 * k) - 2.0 * p.J_AB**2 * np.sin(k + p.phi)
    v = p.J_AA * np.sin(k)
    half = ds2 / (2.0 * s)
    if band == "u":
        out = v + half
    else:
        out = v - half
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BandEdge:
    energy: float
    momentum: float
    band: str  # 'u' or 'l'
    kind: str  # 'min' or 'max'


@dataclass(frozen=True)
class BandEdgeSet:
    """The four band extrema, ordered, plus the middle-gap flag."""

    lower_min: BandEdge
    lower_max: BandEdge
    upper_min: BandEdge
    upper_max: BandEdge
    middle_gap_open: bool

    def edges(self):
        return (self.lower_min, self.lower_max, self.upper_min, self.upper_max)

    def band_interval(self, band: str):
        if band == "l":
            return self.lower_min.energy, self.lower_max.energy
        if band == "u":
            return self.upper_min.energy, self.upper_max.energy
        raise ValueError("band must be 'u' or 'l'")


_EXTREMA_GRID = 100_001


def _refine_extremum(p: LatticeParams, band: str, k0: float, dk: float, sign: float):
    """Polish a grid extremum with a bounded scalar minimization."""

    def objective(k):
        wu, wl = band_energies(k, p)
        w = wu if band == "u" else wl
        return sign * w

    res = minimize_scalar(
        objective,
        bounds=(k0 - dk, k0 + dk),
        method="bounded",
        options={"xatol": 1e-13},
    )
    k_opt = float(res.x)
    wu, wl = band_energies(k_opt, p)
    return float(wu if band == "u" else wl), wrap_angle(k_opt)


@lru_cache(maxsize=256)
def band_extrema(p: LatticeParams) -> BandEdgeSet:
    """Locate the four band extrema on a dense grid with local refinement."""
    k = np.linspace(-math.pi, math.pi, _EXTREMA_GRID)
    wu, wl = band_energies(k, p)
    dk = k[1] - k[0]

    # The offdiagonal element vanishes at k = pi - phi.  When the diagonal
    # entries cross there the extremum is a corner that defeats smooth
    # refinement, so the analytic point competes with the refined one.
    k_star = wrap_angle(math.pi - p.phi)
    wu_star, wl_star = band_energies(k_star, p)
    star = {"u": float(wu_star), "l": float(wl_star)}

    records = {}
    for band, w in (("u", wu), ("l", wl)):
        for kind, idx, sign in (("min", int(np.argmin(w)), 1.0), ("max", int(np.argmax(w)), -1.0)):
            energy, k_opt = _refine_extremum(p, band, float(k[idx]), 2.0 * dk, sign)
            better_star = star[band] < energy if kind == "min" else star[band] > energy
            if better_star:
                energy, k_opt = star[band], float(k_star)
            records[(band, kind)] = BandEdge(energy, float(k_opt), band, kind)

    gap = records[("u", "min")].energy - records[("l", "max")].energy
    return BandEdgeSet(
        lower_min=records[("l", "min")],
        lower_max=records[("l", "max")],
        upper_min=records[("u", "min")],
        upper_max=records[("u", "max")],
        middle_gap_open=bool(gap > 1e-8 * p.hopping_scale),
    )


@dataclass(frozen=True)
class ResonantMode:
    k: float
    direction: str  # 'R' for positive group velocity, 'L' for negative
    band: str
    velocity: float


_ROOT_GRID = 10_001


def resonant_momenta(delta: float, band: str, p: LatticeParams):
    """All momenta with omega_band(k) = delta, labeled by direction.

    Empty when delta lies outside the band.  Raises TangencyError when
    delta sits at a band extremum, where a root has zero velocity.
    """
    if band not in ("u", "l"):
        raise ValueError("band must be 'u' or 'l'")
    edges = band_extrema(p)
    lo, hi = edges.band_interval(band)
    scale = p.hopping_scale
    if abs(delta - lo) < 1e-12 * scale or abs(delta - hi) < 1e-12 * scale:
        raise TangencyError(f"delta = {delta} is tangent to a band edge")
    if delta < lo or delta > hi:
        return []

    k = np.linspace(-math.pi, math.pi, _ROOT_GRID)
    wu, wl = band_energies(k, p)
    w = wu if band == "u" else wl
    g = w - delta

    def residual(kk):
        wu_, wl_ = band_energies(kk, p)
        return float((wu_ if band == "u" else wl_) - delta)

    roots = []
    sign_change = np.where(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    for i in sign_change:
        r = brentq(residual, k[i], k[i + 1], xtol=1e-14, rtol=8.9e-16)
        roots.append(r)
    # Grid points that are themselves (numerically) exact roots.
    for i in np.where(g == 0.0)[0]:
        roots.append(float(k[i]))

    # Newton polish; the brentq roots are already near machine precision.
    polished = []
    for r in roots:
        for _ in range(2):
            v = group_velocity(r, band, p)
            if abs(v) < 1e-9 * scale:
                raise TangencyError(
                    f"resonant momentum at k = {r:.6f} has vanishing group velocity"
                )
            r = r - residual(r) / v
        polished.append(wrap_angle(r))

    polished = sorted(polished)
    deduped = []
    for r in polished:
        if deduped and abs(r - deduped[-1]) < 1e-9:
            continue
        # A root at -pi duplicates one at +pi after wrapping.
        if deduped and abs((r - deduped[0]) - TWO_PI) < 1e-9:
            continue
        deduped.append(r)

    out = []
    for r in deduped:
        v = float(group_velocity(r, band, p))
        out.append(ResonantMode(k=float(r), direction="R" if v > 0 else "L", band=band, velocity=v))
    return out


def band_coupling(k: float, D: str, p: LatticeParams):
    """Sublattice weight of each band at momentum k.

    Returns (G_u, G_l) with G_alpha = |<D|alpha_k>|^2; D is 'A' or 'B'.
    At band touchings the k -> k^- limit is used, as in bloch_transform.
    """
    if D not in ("A", "B"):
        raise ValueError("D must be 'A' or 'B'")
    data = bloch_transform(k, p)
    row = 0 if D == "A" else 1
    return float(abs(data.P[row, 0]) ** 2), float(abs(data.P[row, 1]) ** 2)


def _coupling_arrays(k, D: str, p: LatticeParams):
    e = _transform_entries(k, p)
    if D == "A":
        return np.abs(e["P11"]) ** 2, np.abs(e["P12"]) ** 2
    return np.abs(e["P21"]) ** 2, np.abs(e["P22"]) ** 2


class RebandedBands:
    """Band relabeling across the touching point at |phi| = pi/2.

    Following the crossing at k* = pi - phi (mod 2pi), omega_+ takes the
    upper branch below k* and the lower branch above it, which makes
    both rebanded dispersions and their sublattice couplings smooth.
    """

    def __init__(self, p: LatticeParams, kstar: float):
        self.params = p
        self.kstar = kstar

    def _swap_mask(self, k):
        return np.asarray(k, dtype=float) > self.kstar

    def omega(self, k, branch: str):
        wu, wl = band_energies(k, self.params)
        swap = self._swap_mask(k)
        if branch == "+":
            out = np.where(swap, wl, wu)
        elif branch == "-":
            out = np.where(swap, wu, wl)
        else:
            raise ValueError("branch must be '+' or '-'")
        return out if out.ndim else float(out)

    def coupling(self, k, branch: str, D: str):
        gu, gl = _coupling_arrays(k, D, self.params)
        swap = self._swap_mask(k)
        if branch == "+":
            out = np.where(swap, gl, gu)
        elif branch == "-":
            out = np.where(swap, gu, gl)
        else:
            raise ValueError("branch must be '+' or '-'")
        return out if out.ndim else float(out)


def reband_crossing(p: LatticeParams) -> RebandedBands:
    """Relabel bands through the touching point; requires |phi| = pi/2."""
    if band_extrema(p).middle_gap_open:
        raise ValueError("reband_crossing requires the middle gap closed (phi = +/-pi/2)")
    kstar = float(wrap_angle(math.pi - p.phi))
    return RebandedBands(p, kstar)
