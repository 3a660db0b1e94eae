import math

import numpy as np
import pytest

from lorsolve import (
    Domain,
    NormError,
    ROUTES,
    SampledFn,
    axiom_suite,
    check_orlicz_lorentz_bridge,
    default_test_sets,
    derive_tau,
    fatou_check,
    lorentz_norm,
    lorentz_norm_vector,
    luxemburg_norm,
    monomial_young,
    orlicz_modular,
    power_young,
    seeded_corpus,
)

SQRT2 = math.sqrt(2.0)


class TestLorentzRoutes:
    @pytest.mark.parametrize("route", ROUTES)
    def test_full_indicator_is_sqrt2(self, unit, tau2, route):
        chi = SampledFn.constant(unit, 64, 1.0)
        got = lorentz_norm(chi, tau2, route).value
        assert got == pytest.approx(SQRT2, rel=1e-9)

    @pytest.mark.parametrize("route", ROUTES)
    def test_quarter_indicator(self, unit, tau2, route):
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        # tau_inv(1/4) * 1 = sqrt(1/2)
        got = lorentz_norm(chi, tau2, route).value
        assert got == pytest.approx(math.sqrt(0.5), rel=1e-9)

    @pytest.mark.parametrize("route", ROUTES)
    def test_linear_profile_analytic(self, unit, tau2, route):
        f = SampledFn.from_callable(unit, 4096, lambda x: x)
        got = lorentz_norm(f, tau2, route).value
        assert got == pytest.approx(2.0 * SQRT2 / 3.0, rel=1e-3)

    def test_routes_agree_on_rough_data(self, unit, tau2):
        rng = np.random.default_rng(3)
        f = SampledFn(unit, 512, rng.normal(size=512) * 3.0)
        vals = [lorentz_norm(f, tau2, r).value for r in ROUTES]
        spread = (max(vals) - min(vals)) / max(vals)
        assert spread <= 1e-9

    def test_rearrangement_invariance(self, unit, tau2):
        rng = np.random.default_rng(4)
        vals = rng.uniform(0.0, 2.0, 256)
        f = SampledFn(unit, 256, vals)
        g = SampledFn(unit, 256, np.sort(vals))
        a = lorentz_norm(f, tau2).value
        b = lorentz_norm(g, tau2).value
        assert a == b  # identical distributions give identical sums

    def test_multi_box_domain(self, tau2):
        d = Domain.from_intervals([(0.0, 0.25), (0.5, 1.0)])
        f = SampledFn.constant(d, 32, 1.0)
        assert lorentz_norm(f, tau2).value == pytest.approx(
            math.sqrt(2 * 0.75), rel=1e-12
        )

    def test_unknown_route_rejected(self, unit, tau2):
        f = SampledFn.zeros(unit, 16)
        with pytest.raises(NormError):
            lorentz_norm(f, tau2, "nope")

    def test_zero_function(self, unit, tau2):
        f = SampledFn.zeros(unit, 16)
        for route in ROUTES:
            assert lorentz_norm(f, tau2, route).value == 0.0

    def test_norm_value_metadata(self, unit, tau2):
        f = SampledFn.constant(unit, 16, 1.0)
        nv = lorentz_norm(f, tau2)
        assert nv.route == "distribution"
        assert float(nv) == nv.value

    @pytest.mark.parametrize("m", [1.5, 3.0])
    def test_other_exponents_on_indicator(self, unit, m):
        # ||chi_E|| = tau_inv(mu E) = (m * mu E)^(1/m)
        tau = derive_tau(power_young(m))
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.5)])
        want = (m * 0.5) ** (1.0 / m)
        for route in ROUTES:
            got = lorentz_norm(chi, tau, route).value
            assert got == pytest.approx(want, rel=1e-9)


class TestVectorNorm:
    def test_three_four_five_scaled(self, unit, tau2):
        vals = np.tile([3.0, 4.0], (64, 1))
        f = SampledFn(unit, 64, vals)
        got = lorentz_norm_vector(f, tau2).value
        assert got == pytest.approx(5.0 * SQRT2, rel=1e-12)

    def test_scalar_passthrough(self, unit, tau2):
        f = SampledFn.constant(unit, 16, 2.0)
        assert lorentz_norm_vector(f, tau2).value == pytest.approx(
            2.0 * SQRT2, rel=1e-12
        )


class TestLuxemburg:
    def test_quarter_indicator_exact(self, unit):
        psi = monomial_young(2.0)
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        # modular(chi / t) = (1/4) / t^2 = 1 at t = 1/2
        assert luxemburg_norm(chi, psi).value == 0.5

    def test_linear_profile(self, unit):
        psi = monomial_young(2.0)
        f = SampledFn.from_callable(unit, 1024, lambda x: x)
        # continuum value 1/sqrt(3); discretization shifts it by O(M^-2)
        assert luxemburg_norm(f, psi).value == pytest.approx(
            1.0 / math.sqrt(3.0), rel=1e-6
        )

    def test_zero_function(self, unit):
        assert luxemburg_norm(SampledFn.zeros(unit, 16),
                              monomial_young(2.0)).value == 0.0

    def test_result_is_feasible(self, unit):
        psi = monomial_young(3.0)
        rng = np.random.default_rng(9)
        f = SampledFn(unit, 128, rng.uniform(0.0, 5.0, 128))
        t = luxemburg_norm(f, psi).value
        assert orlicz_modular(f, psi, scale=t) <= 1.0 + 1e-12

    def test_homogeneity(self, unit):
        psi = monomial_young(2.0)
        rng = np.random.default_rng(10)
        f = SampledFn(unit, 128, rng.uniform(0.0, 2.0, 128))
        assert luxemburg_norm(3.0 * f, psi).value == pytest.approx(
            3.0 * luxemburg_norm(f, psi).value, rel=1e-9
        )


class TestModular:
    def test_exact_cell_sum(self, unit):
        psi = monomial_young(2.0)
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        assert orlicz_modular(chi, psi) == 0.25
        assert orlicz_modular(chi, psi, scale=0.5) == 1.0

    def test_vector_input_reduces(self, unit):
        psi = monomial_young(2.0)
        vals = np.tile([3.0, 4.0], (64, 1))
        f = SampledFn(unit, 64, vals)
        assert orlicz_modular(f, psi) == pytest.approx(25.0, rel=1e-12)


class TestBridge:
    def test_quarter_indicator_passes(self, unit, psi2):
        chi = SampledFn.indicator(unit, 256, [(0.0, 0.25)])
        rep = check_orlicz_lorentz_bridge(chi, monomial_young(2.0), psi2)
        assert rep.verdict == "PASS"
        assert rep.gate_passed
        assert rep.modular == 0.25
        assert rep.lorentz == pytest.approx(math.sqrt(0.5), rel=1e-9)
        assert rep.orlicz == pytest.approx(0.5, rel=1e-9)
        assert rep.slack == pytest.approx(1.0 - math.sqrt(0.5), rel=1e-6)

    def test_gate_closed_gives_no_claim(self, unit, psi2):
        big = SampledFn.constant(unit, 64, 3.0)  # modular 9 > 1
        rep = check_orlicz_lorentz_bridge(big, monomial_young(2.0), psi2)
        assert rep.verdict == "NO_CLAIM"
        assert not rep.gate_passed

    def test_diagnostic_diverges_for_power_pair(self, unit, psi2):
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        rep = check_orlicz_lorentz_bridge(chi, monomial_young(2.0), psi2)
        assert rep.diagnostic_verdict == "DIVERGENT"
        vals = np.array(rep.diagnostic_values)
        assert np.all(np.diff(vals) > 0)  # grows with the truncation window

    def test_report_text(self, unit, psi2):
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        text = check_orlicz_lorentz_bridge(
            chi, monomial_young(2.0), psi2
        ).as_text()
        assert "verdict = PASS" in text
        assert "modular" in text


class TestAxiomSuite:
    @pytest.mark.parametrize("m", [1.5, 2.0, 3.0])
    def test_seeded_corpus_passes(self, unit, m):
        tau = derive_tau(power_young(m))
        corpus = seeded_corpus(unit, 256, 40, seed=2026)
        rep = axiom_suite(tau, corpus, default_test_sets(unit))
        assert rep.passed, rep.as_text()

    def test_averaging_constants_within_analytic_bound(self, unit, tau2):
        corpus = seeded_corpus(unit, 256, 24, seed=1)
        rep = axiom_suite(tau2, corpus, default_test_sets(unit))
        for label, measure, c_emp, c_an in rep.constants:
            assert c_emp <= c_an * (1 + 1e-9)
        # full unit interval with psi_2: C_an = integral_0^1 ds/sqrt(2s) = sqrt(2)/...
        full = rep.constants[0]
        assert full[3] == pytest.approx(math.sqrt(2.0), rel=1e-9)

    def test_rejects_vector_corpus(self, unit, tau2):
        f = SampledFn(unit, 16, np.ones((16, 2)))
        with pytest.raises(NormError):
            axiom_suite(tau2, [f], default_test_sets(unit))

    def test_rejects_negative_corpus(self, unit, tau2):
        f = SampledFn.constant(unit, 16, -1.0)
        with pytest.raises(NormError):
            axiom_suite(tau2, [f], default_test_sets(unit))

    def test_report_lists_all_axioms(self, unit, tau2):
        corpus = seeded_corpus(unit, 64, 8, seed=3)
        rep = axiom_suite(tau2, corpus, default_test_sets(unit))
        names = [name for name, ok, detail in rep.axioms]
        assert names == [
            "P1_definiteness",
            "P1_homogeneity",
            "P1_triangle",
            "P2_monotone",
            "P3_monotone_convergence",
            "P4_indicator_finite",
            "P5_averaging_bound",
        ]


class TestWeightRouteSubadditivity:
    def test_triangle_inequality_of_quadrature_route(self, unit, tau2):
        # the weight route integrates f* against (tau_inv)'; subadditivity
        # must survive its quadrature error
        rng = np.random.default_rng(12)
        for _ in range(25):
            f = SampledFn(unit, 128, rng.uniform(0.0, 3.0, 128))
            g = SampledFn(unit, 128, rng.uniform(0.0, 3.0, 128))
            a = lorentz_norm(f, tau2, "rearrangement_weight").value
            b = lorentz_norm(g, tau2, "rearrangement_weight").value
            c = lorentz_norm(f + g, tau2, "rearrangement_weight").value
            assert c <= a + b + 1e-9 * max(1.0, a + b)


class TestSeededCorpus:
    def test_deterministic(self, unit):
        a = seeded_corpus(unit, 64, 12, seed=7)
        b = seeded_corpus(unit, 64, 12, seed=7)
        assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))

    def test_seed_changes_content(self, unit):
        a = seeded_corpus(unit, 64, 12, seed=7)
        b = seeded_corpus(unit, 64, 12, seed=8)
        assert not np.array_equal(a[0].values, b[0].values)

    def test_nonnegative_and_sized(self, unit):
        corpus = seeded_corpus(unit, 64, 9, seed=0)
        assert len(corpus) == 9
        assert all(np.all(f.values >= 0) for f in corpus)


class TestFatou:
    def test_increasing_truncations_pass(self, unit, tau2):
        f = SampledFn.from_callable(unit, 128, lambda x: 2.0 * x)
        seq = [f.clip_at(t) for t in (0.25, 0.5, 1.0, 1.5, 2.0)] + [f]
        rep = fatou_check(seq, tau2)
        assert rep.passed
        assert rep.limit_norm <= rep.surrogate + 1e-10

    def test_constant_sequence_passes(self, unit, tau2):
        f = SampledFn.constant(unit, 64, 1.0)
        rep = fatou_check([f, f, f], tau2)
        assert rep.passed
        assert rep.settled_from == 0

    def test_alternating_sequence_rejected(self, unit, tau2):
        a = SampledFn.constant(unit, 64, 1.0)
        b = SampledFn.constant(unit, 64, 2.0)
        with pytest.raises(NormError, match="witness cell"):
            fatou_check([a, b, a, b, a], tau2)

    def test_empty_sequence_rejected(self, tau2):
        with pytest.raises(NormError):
            fatou_check([], tau2)
