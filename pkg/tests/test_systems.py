import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcorr.errors import ConfigError, DomainError
from qcorr.gaussian import assert_hurwitz, steady_cm
from qcorr.integrate import dopri5
from qcorr.lindblad import LindbladModel, evolve, steady_state_nullspace, thermal_collapse_pair
from qcorr.metrics import TruncationWarning, discord, quadrature_cm_from_state
from qcorr.operators import (
    ModeSpace,
    destroy,
    number,
    partial_trace,
    tensor_states,
    thermal_state,
    trace_distance,
    vacuum_state,
    zero,
)
from qcorr.systems import (
    BathSpec,
    EomcParams,
    HemtParams,
    OpdParams,
    QubitParams,
    build_eomc_drift,
    build_eomc_lindblad,
    build_opd_drift,
    build_opd_lindblad,
    eomc_derived,
    opd_derived,
    thermal_occupation,
)
from qcorr.systems.converters import classical_fixed_point, converter_hamiltonian_terms, eomc_rates, opd_rates
from qcorr.systems.hemt import build_hemt_drift, build_hemt_lindblad, hemt_occupations, hemt_terms
from qcorr.systems.params import HEMT_LINEAR, HEMT_NONLINEAR
from qcorr.systems.qubits import (
    avoided_crossing_gap,
    build_qubit_lindblad,
    qubit_energies,
    qubit_hamiltonian_terms,
    qubit_langevin_rhs,
)
from qcorr.systems.reference import reference_eomc, reference_hemt, reference_opd, reference_qubits

from oracles import bose_einstein

TWO_PI = 2 * math.pi


class TestThermal:
    def test_zero_temperature(self):
        assert thermal_occupation(TWO_PI * 1e9, 0.0) == 0.0

    @pytest.mark.parametrize("f,T,approx", [(10e6, 0.05, 103.7), (10e9, 0.05, 6.8e-5), (5e9, 4.2, 17.0)])
    def test_values(self, f, T, approx):
        n = thermal_occupation(TWO_PI * f, T)
        assert abs(n / bose_einstein(TWO_PI * f, T) - 1) < 1e-12
        assert abs(n / approx - 1) < 0.01

    def test_photodetector_mode(self):
        # direct evaluation gives 0.6206; the quoted 0.617 is within 1%
        n = thermal_occupation(TWO_PI * 1e9, 0.05)
        assert abs(n / bose_einstein(TWO_PI * 1e9, 0.05) - 1) < 1e-12
        assert abs(n / 0.617 - 1) < 0.01

    @pytest.mark.parametrize("w,T", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
    def test_domain(self, w, T):
        with pytest.raises(DomainError):
            thermal_occupation(w, T)

    def test_bath_spec(self):
        bath = BathSpec(((TWO_PI * 10e6, 0.05), (TWO_PI * 10e9, 0.0)))
        n = bath.occupations()
        assert n[1] == 0.0 and abs(n[0] - 103.684) < 1e-3
        with pytest.raises(DomainError):
            BathSpec(((1.0, -1.0),))


class TestParams:
    def test_eomc_table_defaults(self):
        p = EomcParams()
        w_m = TWO_PI * 10e6
        assert (p.wavelength, p.f_m, p.f_w, p.L_c, p.L_mc) == (808e-9, 10e6, 10e9, 1e-3, 10e-9)
        assert p.P_c == p.P_w == 30e-3
        assert p.detuning_oc == p.detuning_mc == pytest.approx(0.01 * w_m, rel=1e-15)
        assert p.kappa_c == pytest.approx(0.08 * w_m, rel=1e-15)
        assert p.kappa_w == pytest.approx(0.02 * w_m, rel=1e-15)
        assert (p.gamma_m, p.mass, p.T_em) == (1000.0, 20e-12, 0.05)

    def test_opd_table_defaults(self):
        p = OpdParams()
        assert (p.wavelength, p.f_pd, p.f_w, p.L_c, p.m_eff, p.T_em) == (808e-9, 1e9, 10e9, 1e-3, 5.11e-35, 0.05)

    def test_qubit_table_defaults(self):
        p = QubitParams()
        assert (p.C_J, p.C_in, p.C_c1, p.C_c2, p.C_c3) == (6.24e-12, 0.08e-12, 0.08e-12, 0.08e-12, 0.08e-12)
        assert p.F_c1 == 606e6 and p.F_J0 == (5.2e9,) * 4
        assert p.kappa == pytest.approx((0.022 * TWO_PI * 5.2e9,) * 4, rel=1e-15)
        assert (p.V_rf, p.T_em) == (1.5e-7, 0.05)

    def test_hemt_table_defaults(self):
        p = HemtParams()
        assert (p.R_g, p.L_g, p.L_d, p.C_gs, p.C_ds, p.C_gd) == (0.3, 75e-12, 70e-12, 107e-15, 51e-15, 60e-15)
        assert (p.R_i, p.R_j, p.g_d, p.g_m, p.V_g, p.V_d, p.T_em, p.T_d) == (0.07, 8.0, 12e-3, 82e-3, 0.03, 0.06, 4.2, 450.0)

    def test_hemt_coupling_defaults(self):
        p = HemtParams()
        assert p.gamma_q1q2 == pytest.approx(0.05 * p.delta_1)
        for name in HEMT_LINEAR[1:]:
            assert getattr(p, name) == pytest.approx(0.02 * p.delta_1)
        for name in HEMT_NONLINEAR:
            assert getattr(p, name) == pytest.approx(0.005 * p.delta_1)

    @pytest.mark.parametrize("record,bad", [
        (EomcParams, {"mass": 0.0}),
        (EomcParams, {"kappa_c": TWO_PI * 20e6}),
        (OpdParams, {"g_op": -1.0}),
        (QubitParams, {"F_J0": 500e6}),
        (QubitParams, {"F_J0": [5e9, 5e9]}),
        (HemtParams, {"gamma_q1q2": TWO_PI * 1e9}),
        (HemtParams, {"delta_1": -1.0}),
    ])
    def test_invalid(self, record, bad):
        with pytest.raises(ConfigError):
            record(**bad)

    def test_round_trip(self):
        for p in (reference_eomc(), reference_opd(), reference_qubits(), reference_hemt()):
            assert type(p).from_dict(p.to_dict()) == p

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="bogus"):
            EomcParams.from_dict({"bogus": 1})


class TestConverterDerived:
    def test_no_alpha_no_G1(self):
        assert eomc_derived(EomcParams(alpha_c=0.0))["G1"] == 0.0

    def test_mass_scaling(self):
        p = reference_eomc()
        d1, d2 = eomc_derived(p), eomc_derived(replace(p, mass=2 * p.mass))
        assert d2["G1"] / d1["G1"] == pytest.approx(1 / math.sqrt(2), rel=1e-14)
        assert d2["G2"] / d1["G2"] == pytest.approx(1 / math.sqrt(2), rel=1e-14)

    def test_reference_ratios(self):
        p = reference_eomc()
        d = eomc_derived(p)
        assert d["G1"] / p.omega_m == pytest.approx(0.1, rel=1e-12)
        assert d["g2"] / p.omega_m == pytest.approx(0.05, rel=1e-12)
        q = reference_opd()
        dq = opd_derived(q)
        assert dq["g_op"] / q.omega_eg == pytest.approx(0.05, rel=1e-12)
        assert dq["g_wp"] / q.omega_eg == pytest.approx(0.05, rel=1e-12)

    def test_drive_normalization(self):
        from scipy.constants import c, hbar

        p = EomcParams()
        w_c = TWO_PI * c / p.wavelength
        assert eomc_derived(p)["E_c"] == pytest.approx(math.sqrt(2 * p.kappa_c * p.P_c / (hbar * w_c)), rel=1e-14)

    def test_mu_zero_decouples(self):
        assert opd_derived(OpdParams(mu_c=0.0))["g_wp"] == 0.0


class TestConverterDrift:
    def test_zero_coupling_blocks(self):
        p = EomcParams(P_c=0.0, P_w=0.0)
        A = build_eomc_drift(p).A
        w = p.omega_m
        kc, kw, dc, dw = p.kappa_c / w, p.kappa_w / w, p.detuning_oc / w, p.detuning_mc / w
        g = 0.5 * p.gamma_m / w
        expected = np.zeros((6, 6))
        expected[:2, :2] = [[-kc, dc], [-dc, -kc]]
        expected[2:4, 2:4] = [[-g, 1.0], [-1.0, -g]]
        expected[4:, 4:] = [[-kw, dw], [-dw, -kw]]
        np.testing.assert_allclose(A, expected, atol=1e-15)

    def test_no_optical_drive_no_amplitude(self):
        r = classical_fixed_point(eomc_rates(replace(reference_eomc(), P_c=0.0, C_p=0.0)))
        assert np.max(np.abs(r[:4])) < 1e-12
        assert np.max(np.abs(r[4:])) > 0.1

    def test_radiation_pressure_feeds_optical_mode(self):
        # with g2 on, the microwave field displaces the resonator, which drives the optics through G1
        rates = eomc_rates(replace(reference_eomc(), P_c=0.0))
        r = classical_fixed_point(rates)
        assert abs(r[3]) > 1e-9
        Xa = math.sqrt(2) * rates.G1 * r[3] * rates.delta_c / (rates.kappa_c**2 + rates.delta_c**2)
        assert r[0] == pytest.approx(-Xa, rel=1e-9)

    @pytest.mark.parametrize("builder,params", [(build_eomc_drift, reference_eomc), (build_opd_drift, reference_opd)])
    def test_hurwitz(self, builder, params):
        model = builder(params())
        assert np.max(assert_hurwitz(model.A).real) < 0
        assert np.max(np.abs(model.A @ classical_fixed_point(
            (eomc_rates if builder is build_eomc_drift else opd_rates)(params())) + model.b)) < 1e-10

    def test_fixed_point_residual(self):
        from qcorr.systems.converters import mean_field_rhs

        rates = eomc_rates(reference_eomc())
        assert np.max(np.abs(mean_field_rhs(rates, classical_fixed_point(rates)))) < 1e-12


class TestConverterLindblad:
    def test_uncoupled_steady_state_is_thermal(self):
        # a colder bath keeps the mechanical occupation small enough for a short truncation
        p = EomcParams(P_c=0.0, P_w=0.0, T_em=3e-4)
        dims = (3, 8, 3)
        rates = eomc_rates(p)
        rho = steady_state_nullspace(build_eomc_lindblad(p, dims))
        expected = tensor_states(
            tensor_states(thermal_state(rates.nbar[0], 3), thermal_state(rates.nbar[1], 8)),
            thermal_state(rates.nbar[2], 3),
        )
        assert rates.nbar[1] > 0.2
        assert trace_distance(rho, expected) < 1e-9

    def test_no_g2_decouples_microwave(self):
        p = replace(reference_eomc(), C_p=0.0)
        dims = (4, 4, 6)
        model = build_eomc_lindblad(p, dims)
        res = evolve(model, vacuum_state(model.space), [0.0, 3.0], store_states=True)
        red = partial_trace(res.states[-1], [2])
        R = eomc_rates(p)
        space = ModeSpace((6,))
        c = destroy(space, 0)
        H = R.delta_w * number(space, 0) + 1j * R.E_w * (c.dag() - c)
        single = LindbladModel(0.5 * (H + H.dag()), tuple(thermal_collapse_pair(c, R.kappa_w, R.nbar[2])))
        alone = evolve(single, vacuum_state(space), [0.0, 3.0], store_states=True).states[-1]
        assert trace_distance(red, alone) < 1e-7

    def test_drive_guard(self):
        with pytest.raises(ConfigError, match="photons"):
            build_eomc_lindblad(EomcParams(), (8, 8, 8))

    def test_valid_models(self):
        for model in (build_eomc_lindblad(reference_eomc(), (4, 4, 4)), build_opd_lindblad(reference_opd(), (4, 4, 4)),
                      build_eomc_lindblad(reference_eomc(), (4, 4, 4), linearized=True)):
            assert model.hamiltonian.is_hermitian()

    @given(st.sampled_from(["G1", "g2", "E_c", "E_w"]))
    def test_term_deletion(self, name):
        rates = eomc_rates(reference_eomc())
        space = ModeSpace((3, 3, 3))
        full = converter_hamiltonian_terms(rates, space)
        cut = converter_hamiltonian_terms(rates.replace(**{name: 0.0}), space)
        term = {"G1": "oc_middle", "g2": "mc_middle", "E_c": "oc_drive", "E_w": "mc_drive"}[name]
        H_full = sum(full.values(), start=zero(space)).matrix
        H_cut = sum(cut.values(), start=zero(space)).matrix
        np.testing.assert_allclose(H_full - H_cut, full[term].matrix, atol=1e-14)
        assert np.max(np.abs(full[term].matrix)) > 0

    def test_frame_consistency(self):
        # undriven, number-conserving converter: the drive-frame shift leaves populations alone
        rates = eomc_rates(replace(reference_eomc(), P_c=0.0, P_w=0.0, alpha_c=0.0))
        space = ModeSpace((3, 4, 3))
        terms = converter_hamiltonian_terms(rates, space)
        H_rot = sum(terms.values(), start=zero(space))
        shift = 3.0 * number(space, 0) + 5.0 * number(space, 2)
        cols = []
        for k, rate in enumerate((rates.kappa_c, rates.gamma_r, rates.kappa_w)):
            cols += thermal_collapse_pair(destroy(space, k), rate, 0.2)
        rho0 = tensor_states(tensor_states(thermal_state(0.3, 3), thermal_state(0.2, 4)), thermal_state(0.1, 3))
        t = [0.0, 1.0, 2.0]
        ops = {f"n{k}": number(space, k) for k in range(3)}
        rot = evolve(LindbladModel(H_rot, tuple(cols)), rho0, t, e_ops=ops)
        lab = evolve(LindbladModel(H_rot + shift, tuple(cols)), rho0, t, e_ops=ops)
        for k in ops:
            np.testing.assert_allclose(rot.expect[k], lab.expect[k], atol=1e-8)


class TestQubits:
    def test_frequency(self):
        en = qubit_energies(QubitParams())
        assert en.Omega[0] / TWO_PI / 1e9 == pytest.approx(math.sqrt(8 * 0.606 * 5.2), rel=1e-12)
        assert en.Omega[0] / TWO_PI / 1e9 == pytest.approx(5.02, rel=1e-3)

    def test_degenerate(self):
        Om = qubit_energies(QubitParams()).Omega
        assert max(Om) == min(Om)

    def test_large_capacitance_decouples(self):
        e_small = qubit_energies(QubitParams(C_c1=1e-9)).E_c_nm[(0, 1)]
        e_big = qubit_energies(QubitParams(C_c1=1e-3)).E_c_nm[(0, 1)]
        assert e_big / e_small == pytest.approx(1e-6)

    def test_levels(self):
        with pytest.raises(ConfigError):
            build_qubit_lindblad(QubitParams(), 5)
        assert build_qubit_lindblad(QubitParams(), 2).space.total_dim == 16

    def test_uncoupled_product_steady_state(self):
        p = QubitParams(C_c1=1e3, C_c2=1e3, C_c3=1e3)
        rho = steady_state_nullspace(build_qubit_lindblad(p, 2))
        parts = [partial_trace(rho, [k]) for k in range(4)]
        prod = parts[0]
        for part in parts[1:]:
            prod = tensor_states(prod, part)
        assert trace_distance(rho, prod) < 1e-8

    def test_avoided_crossing(self):
        gap, element = avoided_crossing_gap(QubitParams())
        assert abs(element) > 0
        # splitting of a resonant 2x2 block is twice its off-diagonal element
        assert abs(gap - 2 * abs(element)) < 1e-9

    def test_ground_state_two_levels(self):
        p = QubitParams(V_rf=0.0, I_b=0.0, T_em=1e-6, C_c1=1e3, C_c2=1e3, C_c3=1e3)
        model = build_qubit_lindblad(p, 2)
        assert trace_distance(steady_state_nullspace(model), vacuum_state(model.space)) < 1e-9

    def test_ground_state_coupled(self):
        # counter-rotating coupling terms keep the steady state slightly off the ground state
        p = QubitParams(V_rf=0.0, I_b=0.0, T_em=1e-6)
        model = build_qubit_lindblad(p, 2)
        rho = steady_state_nullspace(model).matrix
        g = np.linalg.eigh(model.hamiltonian.matrix)[1][:, 0]
        assert np.real(g.conj() @ rho @ g) > 0.98

    @given(st.sampled_from(["bias_1", "drive_1", "coupling_12", "coupling_23", "quartic_2"]))
    @settings(max_examples=10)
    def test_term_deletion(self, term):
        base = QubitParams(I_b=(1e-9, 0.0, 0.0, 0.0))
        change = {"bias_1": {"I_b": (0.0, 0.0, 0.0, 0.0)}, "drive_1": {"V_rf": 0.0},
                  "coupling_12": {"C_c1": 1e300}, "coupling_23": {"C_c2": 1e300},
                  "quartic_2": None}[term]
        space, full = qubit_hamiltonian_terms(base, 3)
        if change is None:
            cut = dict(full)
            cut.pop(term)
        else:
            _, cut = qubit_hamiltonian_terms(replace(base, **change), 3)
        H_full = sum(full.values(), start=zero(space)).matrix
        H_cut = sum(cut.values(), start=zero(space)).matrix
        diff = H_full - H_cut
        if term == "bias_1":
            # the drive amplitude scales with the bias current, so both terms vanish together
            np.testing.assert_allclose(diff, (full["bias_1"] + full["drive_1"]).matrix, atol=1e-12)
        else:
            np.testing.assert_allclose(diff, full[term].matrix, atol=1e-12)
        assert np.max(np.abs(full[term].matrix)) > 0


class TestQubitLangevin:
    def test_cubic_scales_with_charging_energy(self):
        a = qubit_langevin_rhs(QubitParams()).cubic
        b = qubit_langevin_rhs(QubitParams(F_c1=606e3)).cubic
        # Ec / (3 Omega_1) with Omega_1 ~ sqrt(Ec): the coefficient vanishes as sqrt(Ec)
        np.testing.assert_allclose(b / a, math.sqrt(1e-3), rtol=1e-12)

    def test_linear_frequencies(self):
        p = QubitParams(C_c1=1e300, C_c2=1e300, C_c3=1e300)
        lang = qubit_langevin_rhs(p)
        ev = np.linalg.eigvals(lang.linear_drift().A)
        np.testing.assert_allclose(np.sort(np.abs(ev.imag)), np.sort(np.repeat(lang.Omega, 2)), rtol=1e-12)

    def test_undamped_conserves(self):
        p = QubitParams(C_c1=1e300, C_c2=1e300, C_c3=1e300, V_rf=0.0, I_b=0.0)
        lang = replace(qubit_langevin_rhs(p), kappa=np.zeros(4))
        b0 = np.array([0.1 + 0.05j, 0.02, -0.03j, 0.0])

        def energy(b):
            x = (b + b.conj()).real
            return lang.Omega * np.abs(b) ** 2 - 0.25 * lang.cubic * x**4

        sol = dopri5(lang.rhs, b0, [0.0, 5.0], rtol=1e-11, atol=1e-13)
        np.testing.assert_allclose(energy(sol.values[-1]), energy(b0), atol=1e-10)
        lin = replace(lang, cubic=np.zeros(4))
        sol = dopri5(lin.rhs, b0, [0.0, 5.0], rtol=1e-11, atol=1e-13)
        np.testing.assert_allclose(np.abs(sol.values[-1]), np.abs(b0), atol=1e-9)


class TestHemt:
    def test_occupations(self):
        p = HemtParams()
        n1, n2 = hemt_occupations(p)
        assert n1 == n2 == pytest.approx(17.0, rel=0.01)
        hot = hemt_occupations(replace(p, drain_noise=True))[1]
        assert hot == pytest.approx(thermal_occupation(TWO_PI * 5e9, 450.0))

    def test_linear_block_cross_engine(self):
        p = HemtParams(**{k: 0.0 for k in HEMT_NONLINEAR})
        dims = (12, 12)
        model = build_hemt_lindblad(p, dims)
        drift = build_hemt_drift(p)
        from qcorr.gaussian import evolve_cm

        res = evolve(model, vacuum_state(model.space), [0.0, 5.0], store_states=True)
        cm = quadrature_cm_from_state(res.states[-1], 0, 1).sigma
        np.testing.assert_allclose(cm, evolve_cm(drift, 0.5 * np.eye(4), [0.0, 5.0])[-1], atol=1e-2)

    def test_decoupled_zero_discord(self):
        cross = ["gamma_q1q2", "gamma_q1phi2", "gamma_q2phi1", "gamma_q1q2_nl", "gamma_q1phi2phi1", "gamma_q1phi1phi2"]
        p = HemtParams(T_em=0.05, **{k: 0.0 for k in cross})
        rho = steady_state_nullspace(build_hemt_lindblad(p, (8, 8)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            d = discord(quadrature_cm_from_state(rho, 0, 1))
        assert abs(d.quantum) < 1e-6 and abs(d.classical) < 1e-6
        assert np.max(np.abs(steady_cm(build_hemt_drift(p))[:2, 2:])) < 1e-15

    @given(st.sampled_from(HEMT_LINEAR + HEMT_NONLINEAR))
    @settings(max_examples=30)
    def test_term_deletion(self, name):
        p = HemtParams()
        space = ModeSpace((4, 4))
        full = hemt_terms(p, space)
        cut = hemt_terms(p.with_couplings(**{name: 0.0}), space)
        H_full = sum(full.values(), start=zero(space)).matrix
        H_cut = sum(cut.values(), start=zero(space)).matrix
        np.testing.assert_allclose(H_full - H_cut, full[name].matrix, atol=1e-14)
        assert full[name].is_hermitian()

    def test_drift_linear_block_only(self):
        p = HemtParams()
        assert np.array_equal(build_hemt_drift(p).A, build_hemt_drift(p.with_couplings(gamma_phi2phi1=0.0)).A)

