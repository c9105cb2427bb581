"""Emitter self-energies in the sawtooth bath.

Single-emitter and two-emitter (collective) self-energies are evaluated
in closed form by contour integration over y = e^{ik}: the momentum
integral becomes a rational integrand with the two poles

    Q(y) = a y^2 + b y + c,
    a = z J_AA - J_AB^2 e^{i phi},   b = z^2 - 2 J_AB^2,
    c = z J_AA - J_AB^2 e^{-i phi},

of which exactly one lies inside the unit circle whenever z is off the
bands.  A discrete momentum sum over N points is kept as an oracle, and
the exact i0+ limit on the real axis is taken by placing the inside
pole on the resonant momentum with positive group velocity.
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .bloch import (
    LatticeParams,
    _coupling_arrays,
    band_energies,
    band_extrema,
    offdiag_element,
    resonant_momenta,
)

_PAIRS = ("AA", "BB", "AB", "BA")
_PUBLIC_PAIRS = ("AA", "BB", "AB")
_DEGENERATE_POLE_TOL = 1e-10
_KSUM_FALLBACK_N = 200_000


class DegeneratePoleError(ValueError):
    """Contour poles degenerate or the quadratic loses its leading term."""


@dataclass(frozen=True)
class ResiduePoles:
    """Roots of Q(y), both by formula branch (plus/minus) and by modulus."""

    y_plus: complex
    y_minus: complex
    y_min: complex
    y_max: complex


@dataclass(frozen=True)
class SpectralPoint:
    """Markov parameters at a real energy: Sigma(delta + i0+)."""

    delta: float
    sigma: complex
    lamb_shift: float
    decay_rate: float


def _quad_coeffs(z: complex, p: LatticeParams):
    z0 = complex(z) - p.omega_B
    a = z0 * p.J_AA - p.J_AB**2 * cmath.exp(1j * p.phi)
    b = z0 * z0 - 2.0 * p.J_AB**2
    c = z0 * p.J_AA - p.J_AB**2 * cmath.exp(-1j * p.phi)
    return z0, a, b, c


def pole_locations(z: complex, p: LatticeParams) -> ResiduePoles:
    """Poles of the contour integrand at complex energy z.

    y_plus/y_minus follow the sign of the principal square root in the
    quadratic formula; y_min/y_max classify the same two roots by
    modulus.  For z off the bands, y_min is strictly inside the unit
    circle and y_max strictly outside.
    """
    z0, a, b, c = _quad_coeffs(z, p)
    scale = abs(z0) * p.J_AA + p.J_AB**2
    if abs(a) < 1e-14 * max(scale, 1e-300) or abs(c) < 1e-14 * max(scale, 1e-300):
        raise DegeneratePoleError(
            "quadratic degenerates: z J_AA = J_AB^2 e^{+/-i phi}"
        )
    disc = b * b - 4.0 * a * c
    s = cmath.sqrt(disc)
    y_plus = (-b + s) / (2.0 * a)
    y_minus = (-b - s) / (2.0 * a)
    # Re-derive the cancellation-prone root from the product c/a.
    if abs(b + s) < abs(b - s):
        if abs(y_minus) > 0:
            y_plus = c / (a * y_minus)
    else:
        if abs(y_plus) > 0:
            y_minus = c / (a * y_plus)
    if abs(y_plus) <= abs(y_minus):
        y_min, y_max = y_plus, y_minus
    else:
        y_min, y_max = y_minus, y_plus
    return ResiduePoles(y_plus=y_plus, y_minus=y_minus, y_min=y_min, y_max=y_max)


def _check_real_in_band(z: complex, p: LatticeParams):
    if z.imag != 0.0:
        return
    edges = band_extrema(p)
    x = z.real
    for band in ("l", "u"):
        lo, hi = edges.band_interval(band)
        if lo < x < hi:
            raise ValueError(
                "real z inside a band pinches the contour; use "
                "spectral_parameters for the i0+ limit"
            )


def _sigma_A(z0, a, y_in, y_out, g):
    return g * g * z0 / (a * (y_in - y_out))


def _sigma_B(z0, a, c, y_in, y_out, p, g):
    J = p.J_AA
    term0 = J / c  # residue at y = 0, using c = a * y_in * y_out
    term1 = (J * y_in * y_in + z0 * y_in + J) / (a * y_in * (y_in - y_out))
    return g * g * (term0 + term1)


def self_energy(z: complex, D: str, p: LatticeParams, g: float) -> complex:
    """Closed-form single-emitter self-energy Sigma_e^D(z).

    Valid for Im z != 0 or real z outside the bands.  Falls back to the
    momentum sum when the two contour poles nearly coincide.
    """
    if D not in ("A", "B"):
        raise ValueError("D must be 'A' or 'B'")
    z = complex(z)
    _check_real_in_band(z, p)
    z0, a, b, c = _quad_coeffs(z, p)
    poles = pole_locations(z, p)
    y_in, y_out = poles.y_min, poles.y_max
    if abs(y_in - y_out) < _DEGENERATE_POLE_TOL:
        return self_energy_ksum(z, D, p, g, _KSUM_FALLBACK_N)
    if D == "A":
        return _sigma_A(z0, a, y_in, y_out, g)
    return _sigma_B(z0, a, c, y_in, y_out, p, g)


def self_energy_ksum(z: complex, D: str, p: LatticeParams, g: float, N: int) -> complex:
    """Discrete-lattice self-energy: (g^2/N) sum_k sum_bands W/(z - omega).

    Momenta run over the N-cell Brillouin zone; band weights come from
    the Bloch transform.  Serves as the convergence oracle for the
    closed form.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    k = -np.pi + 2.0 * np.pi * np.arange(N) / N
    wu, wl = band_energies(k, p)
    gu, gl = _coupling_arrays(k, D, p)
    z = complex(z)
    total = np.sum(gu / (z - wu)) + np.sum(gl / (z - wl))
    return g * g * total / N


def _onshell_circle_poles(delta: float, p: LatticeParams):
    """Poles e^{ik_R}, e^{ik_L} for real delta strictly inside a band.

    The i0+ prescription puts the right-moving resonance inside the
    unit circle.  Returns None when delta is in no band.
    """
    edges = band_extrema(p)
    for band in ("l", "u"):
        lo, hi = edges.band_interval(band)
        if lo < delta < hi:
            modes = resonant_momenta(delta, band, p)
            right = [m for m in modes if m.direction == "R"]
            left = [m for m in modes if m.direction == "L"]
            if len(right) == 1 and len(left) == 1:
                y_in = cmath.exp(1j * right[0].k)
                y_out = cmath.exp(1j * left[0].k)
                return y_in, y_out, band, modes
            raise ValueError(
                f"expected one crossing per direction, found {len(right)} R / {len(left)} L"
            )
    return None


def spectral_parameters(
    delta: float, D: str, p: LatticeParams, g: float, epsilon: float | None = None
) -> SpectralPoint:
    """Markov parameters at real energy: Lamb shift and decay rate.

    In a gap the self-energy is evaluated on the real axis (the decay
    rate vanishes identically).  Inside a band the exact i0+ limit is
    taken on shell; passing ``epsilon`` overrides this with a finite
    Im z = epsilon evaluation.
    """
    if D not in ("A", "B"):
        raise ValueError("D must be 'A' or 'B'")
    edges = band_extrema(p)
    scale = p.hopping_scale
    for edge in edges.edges():
        if abs(delta - edge.energy) < 1e-9 * scale:
            probe = delta + (1e-6 if edge.kind == "max" else -1e-6) * scale
            try:
                sign = "+" if self_energy(probe + 0j, D, p, g).real > 0 else "-"
            except ValueError:
                sign = "?"
            warnings.warn(
                f"delta sits at the {edge.band} band {edge.kind}; the "
                f"self-energy diverges there (sign {sign} from the gap side)",
                stacklevel=2,
            )
    if epsilon is not None:
        sigma = self_energy(delta + 1j * epsilon, D, p, g)
    else:
        onshell = _onshell_circle_poles(delta, p)
        if onshell is None:
            # Real energy in a gap: Sigma is mathematically real, so
            # discard the roundoff dust in the closed form's imaginary
            # part and make the vanishing decay rate exact.
            sigma = complex(self_energy(delta + 0j, D, p, g).real)
        else:
            y_in, y_out, _, _ = onshell
            z0, a, b, c = _quad_coeffs(delta + 0j, p)
            if D == "A":
                sigma = _sigma_A(z0, a, y_in, y_out, g)
            else:
                sigma = _sigma_B(z0, a, c, y_in, y_out, p, g)
    return SpectralPoint(
        delta=float(delta),
        sigma=sigma,
        lamb_shift=float(sigma.real),
        decay_rate=float(-2.0 * sigma.imag + 0.0),
    )


def _mirror(p: LatticeParams) -> LatticeParams:
    return replace(p, phi=-p.phi)


_MIRROR_PAIR = {"AA": "AA", "BB": "BB", "AB": "BA", "BA": "AB"}


def _contour_value(z: complex, pair: str, r: int, p: LatticeParams) -> complex:
    """(1/2pi) Integral of e^{ikr} K_pair(k) / D(k) dk by residues.

    Kernels: AA -> z, BB -> z + 2 J_AA cos k, AB -> conj(f), BA -> f,
    all taken relative to omega_B.  Negative r maps to the mirrored
    lattice (phi -> -phi) with AB and BA exchanged.
    """
    if r < 0:
        return _contour_value(z, _MIRROR_PAIR[pair], -r, _mirror(p))
    z0, a, b, c = _quad_coeffs(z, p)
    poles = pole_locations(z, p)
    y_in, y_out = poles.y_min, poles.y_max
    if abs(y_in - y_out) < _DEGENERATE_POLE_TOL:
        # _collective_ksum carries the public minus on AB; undo it here,
        # this function returns the bare contour integral.
        flip = -1.0 if pair == "AB" else 1.0
        return flip * _collective_ksum(z, pair, r, p, 1.0, _KSUM_FALLBACK_N)
    J = p.J_AA
    denom = a * (y_in - y_out)
    if pair == "AA":
        return z0 * y_in**r / denom
    if pair == "BB":
        res = (J * y_in * y_in + z0 * y_in + J) * y_in ** (r - 1) / denom
        if r == 0:
            res += J / c
        return res
    if pair == "AB":
        return -p.J_AB * (1.0 + cmath.exp(1j * p.phi) * y_in) * y_in**r / denom
    if pair == "BA":
        res = -p.J_AB * (y_in + cmath.exp(-1j * p.phi)) * y_in ** (r - 1) / denom
        if r == 0:
            res += -p.J_AB * cmath.exp(-1j * p.phi) / c
        return res
    raise ValueError(f"unknown pair {pair!r}")


def collective_self_energy(
    z: complex, pair: str, r12: int, p: LatticeParams, g: float
) -> complex:
    """Two-emitter self-energy Sigma_c^{pair}(z; r12) in closed form.

    r12 is the cell separation x_2 - x_1; pair is 'AA', 'BB' or 'AB'
    (sublattices of the two emitters).  The AB object carries a leading
    minus sign and the conj(f) kernel, the orientation proportional to
    the b-sublattice bound-state coefficient of an a-coupled emitter;
    its magnitude equals g^2 |<a_{x1}| G(z) |b_{x2}>|.  Negative r12 is
    evaluated on the conjugate-pole contour, not by continuing the
    positive-r residue.
    """
    if pair not in _PUBLIC_PAIRS:
        raise ValueError(f"pair must be one of {_PUBLIC_PAIRS}")
    if int(r12) != r12:
        raise ValueError("r12 must be an integer number of cells")
    z = complex(z)
    _check_real_in_band(z, p)
    sign = -1.0 if pair == "AB" else 1.0
    return sign * g * g * _contour_value(z, pair, int(r12), p)


def _collective_ksum(
    z: complex, pair: str, r: int, p: LatticeParams, g: float, N: int
) -> complex:
    """Momentum-sum oracle for the collective self-energy.

    Matches the public sign convention: the AB kernel is -conj(f).
    """
    k = -np.pi + 2.0 * np.pi * np.arange(N) / N
    z0 = complex(z) - p.omega_B
    f = offdiag_element(k, p)
    denom = z0 * z0 + 2.0 * z0 * p.J_AA * np.cos(k) - np.abs(f) ** 2
    if pair == "AA":
        kern = np.full(N, z0, dtype=complex)
    elif pair == "BB":
        kern = z0 + 2.0 * p.J_AA * np.cos(k)
    elif pair == "AB":
        kern = -np.conj(f)
    elif pair == "BA":
        kern = f
    else:
        raise ValueError(f"unknown pair {pair!r}")
    return g * g * np.sum(np.exp(1j * k * r) * kern / denom) / N
