"""Bath-mediated exchange couplings, loop phases, and dynamics validation.

The exchange matrix oracle is a dense ring inversion of (Delta - H) built
by the dynamics module; effective_couplings must reproduce its site-basis
matrix elements exactly (they share no evaluation code).
"""

import numpy as np
import pytest

from sawtooth_qed.bloch import LatticeParams, band_extrema, wrap_angle
from sawtooth_qed.dynamics import EmitterSpec, build_hamiltonian
from sawtooth_qed.spin_model import (
    EffectiveSpinModel,
    MarkovValidityError,
    effective_couplings,
    loop_phase,
    unit_plaquette_phase,
    validate_exchange,
)

PF = LatticeParams(1.0, 1.0, 2.094)
DMID = -0.2584618484551703  # centre of the middle gap of PF


def ring_exchange_oracle(p, delta, emitters, n_cells=600):
    """g_i g_j <D_i, x_i| (delta - H)^-1 |D_j, x_j> by dense inversion."""
    H = build_hamiltonian(p, n_cells).to_sparse().toarray()
    G = np.linalg.inv(delta * np.eye(2 * n_cells) - H)

    def idx(em):
        return (em.cell % n_cells) if em.D == "A" else n_cells + (em.cell % n_cells)

    n = len(emitters)
    J = np.zeros((n, n), complex)
    for i in range(n):
        for j in range(n):
            if i != j:
                J[i, j] = emitters[i].g * emitters[j].g * G[idx(emitters[i]), idx(emitters[j])]
    return J


class TestEffectiveCouplings:
    def test_matches_ring_inversion(self):
        ems = (
            EmitterSpec("B", 0, DMID, 0.02),
            EmitterSpec("B", 2, DMID, 0.02),
            EmitterSpec("A", 1, DMID, 0.02),
            EmitterSpec("A", 4, DMID, 0.03),
        )
        model = effective_couplings(ems, PF, DMID)
        oracle = ring_exchange_oracle(PF, DMID, ems)
        for i in range(4):
            for j in range(4):
                if i == j:
                    continue
                assert model.coupling(i, j) == pytest.approx(
                    oracle[i, j], rel=1e-9), (i, j)

    def test_frozen_values(self):
        # Dense 2000-cell ring inversion, frozen.
        ems = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 1, DMID, 0.02))
        m = effective_couplings(ems, PF, DMID)
        assert m.coupling(0, 1) == pytest.approx(
            -0.0003137144172929558 + 3.942107912359627e-05j, rel=1e-10)
        ems = (EmitterSpec("A", 0, DMID, 0.02), EmitterSpec("B", 2, DMID, 0.02))
        m = effective_couplings(ems, PF, DMID)
        assert m.coupling(0, 1) == pytest.approx(
            -5.334518589424934e-05 - 8.389494235799546e-05j, rel=1e-10)

    def test_hermitian(self):
        ems = (
            EmitterSpec("A", 0, DMID, 0.02),
            EmitterSpec("B", 1, DMID, 0.05),
            EmitterSpec("A", 3, DMID, 0.01),
        )
        model = effective_couplings(ems, PF, DMID)
        J = model.couplings
        assert np.max(np.abs(J - J.conj().T)) < 1e-18
        assert np.all(np.diag(J) == 0)

    def test_geometric_mean_coupling(self):
        # J_ij carries sqrt(g_i g_j): doubling one emitter's g scales the
        # row by sqrt(2)^2 = 2 only through the product.
        e1 = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 1, DMID, 0.02))
        e2 = (EmitterSpec("B", 0, DMID, 0.04), EmitterSpec("B", 1, DMID, 0.01))
        m1 = effective_couplings(e1, PF, DMID)
        m2 = effective_couplings(e2, PF, DMID)
        assert m1.coupling(0, 1) == pytest.approx(m2.coupling(0, 1), rel=1e-12)

    def test_model_container(self):
        ems = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 1, DMID, 0.02))
        model = effective_couplings(ems, PF, DMID)
        assert isinstance(model, EffectiveSpinModel)
        assert len(model) == 2
        assert model.delta == DMID
        assert model.coupling(1, 0) == np.conj(model.coupling(0, 1))

    def test_rejects_in_band_detuning(self):
        e = band_extrema(PF)
        lo, hi = e.band_interval("l")
        bad = 0.5 * (lo + hi)
        ems = (EmitterSpec("B", 0, bad, 0.02), EmitterSpec("B", 1, bad, 0.02))
        with pytest.raises(MarkovValidityError):
            effective_couplings(ems, PF, bad)

    def test_rejects_mismatched_detunings(self):
        ems = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 1, 0.9 * DMID, 0.02))
        with pytest.raises(ValueError):
            effective_couplings(ems, PF, DMID)

    def test_rejects_duplicates_and_singletons(self):
        ems = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 0, DMID, 0.05))
        with pytest.raises(ValueError):
            effective_couplings(ems, PF, DMID)
        with pytest.raises(ValueError):
            effective_couplings((EmitterSpec("B", 0, DMID, 0.02),), PF, DMID)


class TestLoopPhase:
    def make_model(self, p, delta, sites):
        ems = tuple(EmitterSpec(D, c, delta, 0.02) for D, c in sites)
        return effective_couplings(ems, p, delta)

    def test_frozen_triangle(self):
        model = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        assert loop_phase(model, (0, 1, 2)) == pytest.approx(
            1.9673669721657898, abs=1e-10)

    def test_translation_invariance(self):
        a = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        b = self.make_model(PF, DMID, [("A", 5), ("A", 6), ("B", 5)])
        assert loop_phase(a, (0, 1, 2)) == pytest.approx(
            loop_phase(b, (0, 1, 2)), abs=1e-12)

    def test_flux_antisymmetry(self):
        pm = LatticeParams(1.0, 1.0, -2.094)
        a = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        b = self.make_model(pm, DMID, [("A", 0), ("A", 1), ("B", 0)])
        assert loop_phase(a, (0, 1, 2)) == pytest.approx(
            -loop_phase(b, (0, 1, 2)), abs=1e-12)

    def test_cyclic_start_invariance(self):
        model = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        assert loop_phase(model, (0, 1, 2)) == pytest.approx(
            loop_phase(model, (1, 2, 0)), abs=1e-14)

    def test_reversal_flips_sign(self):
        model = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        assert loop_phase(model, (0, 2, 1)) == pytest.approx(
            -loop_phase(model, (0, 1, 2)), abs=1e-14)

    def test_zero_flux_gives_trivial_phase(self):
        # With phi = 0 the couplings can be made simultaneously real:
        # every loop phase collapses to 0 or pi.
        p0 = LatticeParams(1.0, 1.0, 0.0)
        model = self.make_model(p0, 0.5, [("A", 0), ("A", 1), ("B", 0)])
        ph = loop_phase(model, (0, 1, 2))
        assert min(abs(ph), abs(abs(ph) - np.pi)) < 1e-10

    def test_path_validation(self):
        model = self.make_model(PF, DMID, [("A", 0), ("A", 1), ("B", 0)])
        with pytest.raises(ValueError):
            loop_phase(model, (0, 1))
        with pytest.raises(ValueError):
            loop_phase(model, (0, 1, 1))
        with pytest.raises(ValueError):
            loop_phase(model, (0, 1, 5))


class TestUnitPlaquettePhase:
    def test_frozen_value(self):
        assert unit_plaquette_phase(-0.01, PF) == pytest.approx(
            -1.2226439933059092, abs=1e-12)

    def test_zero_flux_control(self):
        p0 = LatticeParams(1.0, 1.0, 0.0)
        assert unit_plaquette_phase(0.5, p0) == pytest.approx(0.0, abs=1e-12)

    def test_flux_antisymmetry(self):
        pm = LatticeParams(1.0, 1.0, -2.094)
        a = unit_plaquette_phase(-0.01, PF)
        b = unit_plaquette_phase(-0.01, pm)
        assert a == pytest.approx(-b, abs=1e-12)

    def test_independent_of_g(self):
        a = unit_plaquette_phase(-0.01, PF, g=0.1)
        b = unit_plaquette_phase(-0.01, PF, g=0.02)
        assert a == pytest.approx(b, abs=1e-14)

    def test_wrapped(self):
        ph = unit_plaquette_phase(-0.01, PF)
        assert -np.pi < ph <= np.pi
        assert ph == pytest.approx(wrap_angle(ph), abs=1e-15)


class TestValidateExchange:
    def test_bb_pair_oscillation(self):
        ems = (EmitterSpec("B", 0, DMID, 0.02), EmitterSpec("B", 2, DMID, 0.02))
        out = validate_exchange(ems, PF)
        assert out["relative_error"] < 0.005
        assert out["leakage"] < 0.02
        assert out["t_swap"] == pytest.approx(np.pi / out["omega_exact"], rel=1e-12)
        assert out["omega_predicted"] == pytest.approx(2 * out["J12"], rel=1e-15)

    def test_requires_two_emitters(self):
        ems = (
            EmitterSpec("B", 0, DMID, 0.02),
            EmitterSpec("B", 1, DMID, 0.02),
            EmitterSpec("B", 2, DMID, 0.02),
        )
        with pytest.raises(ValueError):
            validate_exchange(ems, PF)

    def test_zero_coupling_rejected(self):
        ems = (EmitterSpec("B", 0, DMID, 0.0), EmitterSpec("B", 2, DMID, 0.0))
        with pytest.raises(ValueError):
            validate_exchange(ems, PF)
