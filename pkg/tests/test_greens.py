"""Self-energies: closed contour forms against independent oracles.

Frozen literals come from two oracles that share no code with greens.py:

* single-emitter values: direct numerical k-integrals of the momentum-space
  matrix element, quadrature refined until stable to 1e-14;
* collective values: dense inversion of (z - H) for a 2000-cell ring built
  by dynamics.build_hamiltonian, read off at the emitter sites.
"""

import cmath

import numpy as np
import pytest

from sawtooth_qed.bloch import LatticeParams, band_extrema
from sawtooth_qed.greens import (
    DegeneratePoleError,
    SpectralPoint,
    collective_self_energy,
    pole_locations,
    self_energy,
    self_energy_ksum,
    spectral_parameters,
)

RNG = np.random.default_rng(816)

P_REF = LatticeParams(1.0, 1.0, np.pi / 3)


class TestPoleLocations:
    def test_vieta_relations(self):
        # Roots of the residue quadratic a y^2 + b y + c obey Vieta's
        # formulas; check through the returned pair without recomputing
        # the coefficients here.
        for _ in range(20):
            z = complex(RNG.uniform(-3, 3), RNG.uniform(0.01, 1.0))
            p = LatticeParams(RNG.uniform(0.5, 1.5), RNG.uniform(0.5, 1.5), RNG.uniform(-3, 3))
            poles = pole_locations(z, p)
            assert {poles.y_min, poles.y_max} == {poles.y_plus, poles.y_minus}
            assert abs(poles.y_min) <= abs(poles.y_max) + 1e-15

    def test_unit_circle_split_off_axis(self):
        # For Im z != 0 exactly one root lies inside the unit circle.
        for _ in range(30):
            z = complex(RNG.uniform(-3, 3), RNG.choice([-1, 1]) * RNG.uniform(1e-4, 0.5))
            p = LatticeParams(1.0, RNG.uniform(0.3, 1.8), RNG.uniform(-3, 3))
            poles = pole_locations(z, p)
            assert abs(poles.y_min) < 1.0 < abs(poles.y_max)

    def test_conjugate_symmetry(self):
        # Conjugating z swaps the leading and trailing quadratic
        # coefficients, so the roots map to reciprocal conjugates.
        z = 0.8 + 0.3j
        p = LatticeParams(1.0, 0.9, 1.3)
        a = pole_locations(z, p)
        b = pole_locations(np.conj(z), p)
        assert abs(b.y_min - 1.0 / np.conj(a.y_max)) < 1e-12
        assert abs(b.y_max - 1.0 / np.conj(a.y_min)) < 1e-12


class TestSelfEnergyOracle:
    # (z, D, lattice args, g) -> frozen oracle value
    CASES = [
        (0.5 + 0.001j, "A", (1.0, 1.0, np.pi / 3), 0.1,
         -0.01997438214991269 - 0.0005987694702986354j),
        (0.5 + 0.001j, "B", (1.0, 1.0, np.pi / 3), 0.1,
         -0.019971827593485807 - 0.0006786567859376277j),
        (-1.2 + 0.02j, "A", (1.0, 0.7, 1.1), 0.05,
         -6.179070721428324e-06 - 0.0010204169946721217j),
        (-1.2 + 0.02j, "B", (1.0, 0.7, 1.1), 0.05,
         -0.0015916880947695281 - 0.000787519608237133j),
        (4.5 + 0.0j, "A", (1.0, 1.3, -2.0), 0.1,
         0.0034837263862452414 + 0.0j),
        (4.5 + 0.0j, "B", (1.0, 1.3, -2.0), 0.1,
         0.002942798125548418 + 0.0j),
    ]

    @pytest.mark.parametrize("z,D,args,g,expected", CASES)
    def test_frozen_values(self, z, D, args, g, expected):
        p = LatticeParams(*args)
        got = self_energy(z, D, p, g)
        assert abs(got - expected) <= 1e-12 * max(abs(expected), 1e-6)

    def test_matches_momentum_sum(self):
        # The closed form equals the explicit N-site momentum sum.
        p = LatticeParams(1.0, 0.8, 1.9)
        for z in (0.3 + 0.05j, -2.0 + 0.01j, 1.5 - 0.08j):
            for D in ("A", "B"):
                closed = self_energy(z, D, p, 0.1)
                ksum = self_energy_ksum(z, D, p, 0.1, 40_000)
                assert abs(closed - ksum) / abs(closed) < 1e-6

    def test_quadratic_in_g(self):
        p = LatticeParams(1.0, 1.1, 0.7)
        z = 0.4 + 0.02j
        s1 = self_energy(z, "A", p, 1.0)
        s2 = self_energy(z, "A", p, 0.3)
        assert abs(s2 - 0.09 * s1) < 1e-14

    def test_hermitian_analyticity(self):
        # Sigma(conj z) = conj(Sigma(z)) for a Hermitian bath.
        for _ in range(10):
            z = complex(RNG.uniform(-3, 3), RNG.uniform(0.01, 0.5))
            p = LatticeParams(1.0, RNG.uniform(0.4, 1.6), RNG.uniform(-3, 3))
            for D in ("A", "B"):
                s = self_energy(z, D, p, 0.1)
                sc = self_energy(np.conj(z), D, p, 0.1)
                assert abs(sc - np.conj(s)) < 1e-13

    def test_herglotz_sign(self):
        # Im Sigma < 0 in the upper half plane (resolvent of Hermitian H).
        for _ in range(20):
            z = complex(RNG.uniform(-3.5, 3.5), RNG.uniform(1e-3, 1.0))
            p = LatticeParams(1.0, RNG.uniform(0.4, 1.6), RNG.uniform(-3, 3))
            for D in ("A", "B"):
                assert self_energy(z, D, p, 0.1).imag < 0

    def test_real_axis_in_gap_requires_gap(self):
        # Real z inside a band must be rejected: the contour is ill-posed
        # without the i0+ prescription.
        p = P_REF
        e = band_extrema(p)
        lo, hi = e.band_interval("l")
        mid = 0.5 * (lo + hi)
        with pytest.raises(ValueError):
            self_energy(complex(mid), "A", p, 0.1)
        # in the gap it is fine, and real
        s = self_energy(0.25 + 0j, "A", p, 0.1)
        assert abs(s.imag) < 1e-15

    def test_decay_large_z(self):
        # Sigma ~ g^2 / z far from the spectrum.
        p = LatticeParams(1.0, 1.0, 1.0)
        g = 0.1
        for z in (60.0 + 0j, 120.0 + 0j):
            s = self_energy(z, "A", p, g)
            assert abs(s - g * g / z) < 5e-5 * abs(g * g / z) * 60


class TestSpectralParameters:
    def test_gap_values_are_real(self):
        p = P_REF
        sp = spectral_parameters(0.25, "A", p, 0.1)
        assert isinstance(sp, SpectralPoint)
        assert sp.decay_rate == 0.0
        assert abs(sp.sigma.imag) < 1e-15
        assert sp.lamb_shift == sp.sigma.real

    def test_band_values_have_positive_decay(self):
        p = P_REF
        e = band_extrema(p)
        lo, hi = e.band_interval("u")
        sp = spectral_parameters(0.5 * (lo + hi), "A", p, 0.1)
        assert sp.decay_rate > 0
        assert abs(sp.sigma.imag + 0.5 * sp.decay_rate) < 1e-15

    def test_onshell_limit_matches_epsilon_extrapolation(self):
        # Sigma(delta + i0+) from the on-shell contour agrees with a
        # small-epsilon Richardson extrapolation of Sigma(delta + i eps).
        p = P_REF
        e = band_extrema(p)
        lo, hi = e.band_interval("l")
        delta = lo + 0.41 * (hi - lo)
        for D in ("A", "B"):
            exact = spectral_parameters(delta, D, p, 0.1).sigma
            s1 = self_energy(delta + 1e-6j, D, p, 0.1)
            s2 = self_energy(delta + 5e-7j, D, p, 0.1)
            extrap = 2 * s2 - s1
            assert abs(exact - extrap) < 1e-9

    def test_epsilon_override(self):
        p = P_REF
        sp = spectral_parameters(0.7, "B", p, 0.1, epsilon=1e-3)
        direct = self_energy(0.7 + 1e-3j, "B", p, 0.1)
        assert abs(sp.sigma - direct) < 1e-15

    def test_lamb_shift_monotone_in_gap(self):
        # d Sigma / d x = -g^2 <D|(x-H)^-2|D> < 0 on the real axis in a gap.
        p = P_REF
        x = np.linspace(0.05, 0.45, 21)
        vals = [spectral_parameters(xi, "A", p, 0.1).lamb_shift for xi in x]
        assert np.all(np.diff(vals) < 0)

    def test_band_edge_warning(self):
        p = P_REF
        e = band_extrema(p)
        with pytest.warns(UserWarning):
            spectral_parameters(e.upper_max.energy, "A", p, 0.1)

    def test_invalid_sublattice(self):
        with pytest.raises(ValueError):
            spectral_parameters(0.25, "C", P_REF, 0.1)


class TestCollectiveOracle:
    # Dense 2000-cell ring inversion at z in the middle gap of
    # (J_AA, J_AB, phi) = (1, 1, 2.094), g = 0.02, mapped to this module's
    # orientation (conjugate for AA/BB, negated conjugate for AB).
    P = LatticeParams(1.0, 1.0, 2.094)
    Z = -0.2584618484551703
    G = 0.02
    CASES = [
        ("AA", 0, 0.0001457450501309911 + 0.0j),
        ("AA", 2, -5.7785350503305304e-05 + 3.488484185992483e-05j),
        ("BB", 0, -6.013013887530369e-05 + 0.0j),
        ("BB", 1, -0.0003137144172929558 - 3.942107912359627e-05j),
        ("BB", 2, -3.1423580311262044e-05 - 0.00021286615223174447j),
        ("AB", 0, -0.00019222932657921146 + 9.554987333392066e-05j),
        ("AB", 1, -9.773315991619431e-05 - 0.00010858235856821193j),
        ("AB", 2, 5.334518589424934e-05 - 8.389494235799546e-05j),
        ("AB", -1, 0.00017881636809676817 - 0.00011877120354659426j),
        ("AB", -2, -4.522338924192108e-05 - 0.00013891272153735164j),
    ]

    @pytest.mark.parametrize("pair,r,expected", CASES)
    def test_frozen_ring_values(self, pair, r, expected):
        got = collective_self_energy(self.Z, pair, r, self.P, self.G)
        assert abs(got - expected) <= 1e-11 * max(abs(expected), 1e-8)

    def test_quadratic_in_g(self):
        a = collective_self_energy(self.Z, "BB", 1, self.P, 1.0)
        b = collective_self_energy(self.Z, "BB", 1, self.P, 0.25)
        assert abs(b - 0.0625 * a) < 1e-14

    def test_r_zero_consistency(self):
        # Same-sublattice r = 0 collective value reduces to the single
        # self-energy.
        for D in ("A", "B"):
            single = self_energy(complex(self.Z), D, self.P, self.G)
            coll = collective_self_energy(self.Z, D + D, 0, self.P, self.G)
            assert abs(single - coll) < 1e-15

    def test_same_sublattice_reciprocity(self):
        # H is Hermitian but not real, so reciprocity at real z gives
        # G(-r) = conj(G(r)) on a sublattice: equal magnitude, with the
        # phi-induced phase flipping sign.  Plain evenness in r fails.
        for pair in ("AA", "BB"):
            for r in (1, 2, 3):
                plus = collective_self_energy(self.Z, pair, r, self.P, self.G)
                minus = collective_self_energy(self.Z, pair, -r, self.P, self.G)
                assert abs(minus - np.conj(plus)) < 1e-15
        # and the asymmetry is real: r = 1 values are not even
        plus = collective_self_energy(self.Z, "AA", 1, self.P, self.G)
        minus = collective_self_energy(self.Z, "AA", -1, self.P, self.G)
        assert abs(plus - minus) > 1e-5

    def test_ab_chiral_asymmetry(self):
        # The AB object is not even in r once phi != 0: the lattice tells
        # left from right.
        plus = collective_self_energy(self.Z, "AB", 1, self.P, self.G)
        minus = collective_self_energy(self.Z, "AB", -1, self.P, self.G)
        assert abs(plus - minus) > 1e-5

    def test_gap_decay_with_distance(self):
        # In a gap the kernel decays exponentially in |r|.
        mags = [abs(collective_self_energy(self.Z, "BB", r, self.P, self.G))
                for r in (1, 3, 5, 7)]
        assert mags[0] > mags[1] > mags[2] > mags[3]
        # log-linear: ratios roughly constant
        ratios = [mags[i + 1] / mags[i] for i in range(3)]
        assert max(ratios) / min(ratios) < 1.5

    def test_rejects_in_band_real_energy(self):
        p = self.P
        e = band_extrema(p)
        lo, hi = e.band_interval("u")
        with pytest.raises(ValueError):
            collective_self_energy(0.5 * (lo + hi), "AA", 1, p, 0.1)

    def test_rejects_bad_pair_and_noninteger(self):
        with pytest.raises(ValueError):
            collective_self_energy(self.Z, "BA", 1, self.P, 0.1)
        with pytest.raises(ValueError):
            collective_self_energy(self.Z, "AA", 1.5, self.P, 0.1)

    def test_error_types(self):
        assert issubclass(DegeneratePoleError, ValueError)
