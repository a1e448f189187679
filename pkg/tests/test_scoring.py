import numpy as np
import pytest

from terratint.colors import LabColor, harmony_score
from terratint.grid import DominantProfile
from terratint.scoring import (
    ConventionSpec,
    SchemeMode,
    ScoringParams,
    TintScheme,
    ZoneAreas,
    aerial_score,
    aesthetic_score,
    continuity_score,
    convention_score,
    discrimination_check,
    score_report,
    similarity_score,
    subjective_score,
)

import oracles


def gray_scheme(Ls, mode=SchemeMode.GRADED):
    return TintScheme(colors=[LabColor(L, 0, 0) for L in Ls], mode=mode)


def scheme_with_diffs(diffs, mode=SchemeMode.GRADED):
    """Lab sequence along L whose successive delta E profile equals diffs."""
    Ls = [0.0]
    for d in diffs:
        Ls.append(Ls[-1] + d)
    return gray_scheme(Ls, mode)


class TestContinuity:
    def test_exact_linear_increasing(self):
        scheme = gray_scheme([20, 40, 60, 80])
        assert continuity_score(scheme, ScoringParams(k=1, t=1)) == 1.0

    def test_direction_flip_gives_zero(self):
        scheme = gray_scheme([20, 40, 60, 80])
        assert continuity_score(scheme, ScoringParams(k=1, t=-1)) == 0.0

    def test_constant_lightness_no_direction(self):
        scheme = gray_scheme([50, 50, 50, 50])
        for t in (1, -1):
            assert continuity_score(scheme, ScoringParams(k=1, t=t)) == 0.0

    def test_exact_cubic(self):
        Ls = [10 + 0.1 * x**3 + x for x in range(1, 7)]
        scheme = gray_scheme(Ls)
        assert continuity_score(scheme, ScoringParams(k=3, t=1)) == 1.0

    def test_small_n_exact_fit(self):
        # n <= k+1: the fit is exact by construction, gate still applies
        scheme = gray_scheme([30, 70])
        assert continuity_score(scheme, ScoringParams(k=3, t=1)) == 1.0
        assert continuity_score(scheme, ScoringParams(k=3, t=-1)) == 0.0

    def test_noisy_sequence_below_one(self):
        scheme = gray_scheme([20, 55, 30, 80, 60, 90])
        score = continuity_score(scheme, ScoringParams(k=1, t=1))
        assert 0.0 < score < 1.0

    def test_chroma_sequence_participates(self):
        # increasing L but erratic chroma should lose score under k=1
        colors = [
            LabColor(20, 0, 0),
            LabColor(40, 60, 0),
            LabColor(60, 0, 0),
            LabColor(80, 60, 0),
        ]
        score = continuity_score(TintScheme(colors=colors), ScoringParams(k=1, t=1))
        assert score < 1.0


class TestAerial:
    def test_increasing_differences(self):
        assert aerial_score(scheme_with_diffs([5, 10, 20]), ScoringParams()) == 1.0

    def test_decreasing_differences(self):
        assert aerial_score(scheme_with_diffs([20, 10, 5]), ScoringParams()) == 0.0

    def test_disabled_returns_one(self):
        params = ScoringParams(aerial_enabled=False)
        assert aerial_score(scheme_with_diffs([20, 10, 5]), params) == 1.0

    def test_two_colors_returns_one(self):
        assert aerial_score(gray_scheme([10, 90]), ScoringParams()) == 1.0

    def test_equal_differences_returns_one(self):
        assert aerial_score(scheme_with_diffs([10, 10, 10]), ScoringParams()) == 1.0

    def test_shift_invariance_of_difference_profile(self):
        # adding a constant to every successive delta E leaves the
        # second differences unchanged
        base = aerial_score(scheme_with_diffs([5, 12, 9, 30]), ScoringParams())
        shifted = aerial_score(scheme_with_diffs([25, 32, 29, 50]), ScoringParams())
        assert shifted == pytest.approx(base, abs=1e-12)


class TestConvention:
    def test_exact_match(self):
        scheme = gray_scheme([20, 80])
        conv = ConventionSpec(assignments={1: LabColor(20, 0, 0)})
        assert convention_score(scheme, conv, ScoringParams()) == 1.0

    def test_gamma_over_distance(self):
        scheme = gray_scheme([20, 80])
        conv = ConventionSpec(assignments={1: LabColor(40, 0, 0)})  # delta E 20
        assert convention_score(scheme, conv, ScoringParams(gamma=10.0)) == 0.5

    def test_empty_spec_is_unconstrained(self):
        assert convention_score(gray_scheme([20, 80]), ConventionSpec(), ScoringParams()) == 1.0

    def test_monotone_in_distance(self):
        params = ScoringParams(gamma=10.0)
        prev = 1.1
        for L in (20, 35, 50, 65):
            conv = ConventionSpec(assignments={1: LabColor(float(L), 0, 0)})
            s = convention_score(gray_scheme([20, 80]), conv, params)
            assert s <= prev
            prev = s

    def test_zone_bounds_validated(self):
        conv = ConventionSpec(assignments={5: LabColor(0, 0, 0)})
        with pytest.raises(ValueError):
            convention_score(gray_scheme([20, 80]), conv, ScoringParams())

    def test_average_over_assigned_only(self):
        scheme = gray_scheme([20, 50, 80])
        conv = ConventionSpec(
            assignments={1: LabColor(20, 0, 0), 3: LabColor(100, 0, 0)}  # exact, delta E 20
        )
        assert convention_score(scheme, conv, ScoringParams(gamma=10.0)) == pytest.approx(0.75)


class TestSubjective:
    def test_product(self):
        scheme = gray_scheme([20, 40, 60, 80])
        conv = ConventionSpec(assignments={1: LabColor(40, 0, 0)})  # 0.5 at gamma 10
        params = ScoringParams(k=1, t=1, gamma=10.0)
        assert subjective_score(scheme, conv, params) == pytest.approx(0.5)

    def test_annihilator(self):
        scheme = gray_scheme([80, 60, 40, 20])  # decreasing, t=+1 gate fails
        assert subjective_score(scheme, ConventionSpec(), ScoringParams(t=1)) == 0.0


def profile_of(colors_props):
    return DominantProfile(entries=[(LabColor(*c), p) for c, p in colors_props])


class TestSimilarity:
    def test_perfect_alignment(self):
        profile = profile_of([((20, 0, 0), 0.5), ((80, 0, 0), 0.5)])
        scheme = gray_scheme([20, 80])
        areas = ZoneAreas(proportions=[0.5, 0.5])
        assert similarity_score(scheme, profile, areas, ScoringParams()) == pytest.approx(1.0)

    def test_distance_alpha_exact(self):
        # single dominant, single-ish map mass at exactly alpha -> weight 1
        profile = profile_of([((50, 0, 0), 1.0)])
        scheme = gray_scheme([60, 60])  # both zones at delta E 10 = alpha
        areas = ZoneAreas(proportions=[0.6, 0.4])
        assert similarity_score(scheme, profile, areas, ScoringParams(alpha=10.0)) == pytest.approx(1.0)

    def test_far_colors_score_low(self):
        profile = profile_of([((0, -120, -120), 1.0)])
        scheme = gray_scheme([95, 99])
        areas = ZoneAreas(proportions=[0.5, 0.5])
        score = similarity_score(scheme, profile, areas, ScoringParams(alpha=10.0))
        assert score < 0.1

    def test_profile_permutation_invariance(self):
        rng = np.random.default_rng(6)
        entries = [
            ((rng.uniform(0, 100), rng.uniform(-50, 50), rng.uniform(-50, 50)), p)
            for p in (0.2, 0.3, 0.1, 0.4)
        ]
        scheme = gray_scheme([15, 35, 55, 75])
        areas = ZoneAreas(proportions=[0.25] * 4)
        a = similarity_score(scheme, profile_of(entries), areas, ScoringParams())
        b = similarity_score(scheme, profile_of(entries[::-1]), areas, ScoringParams())
        assert a == pytest.approx(b, abs=1e-12)

    def test_continuous_mode_uses_ramp_masses(self):
        profile = profile_of([((50, 0, 0), 1.0)])
        scheme = gray_scheme([40, 60], mode=SchemeMode.CONTINUOUS)
        params = ScoringParams(ramp_samples=8)
        areas = ZoneAreas(proportions=[1.0 / 8] * 8)
        score = similarity_score(scheme, profile, areas, params)
        assert 0.0 <= score <= 1.0
        with pytest.raises(ValueError):
            similarity_score(scheme, profile, ZoneAreas(proportions=[0.5, 0.5]), params)

    def test_graded_length_mismatch(self):
        profile = profile_of([((50, 0, 0), 1.0)])
        with pytest.raises(ValueError):
            similarity_score(
                gray_scheme([20, 80]), profile, ZoneAreas(proportions=[1.0]), ScoringParams()
            )


class TestAesthetic:
    def test_product_of_similarity_and_harmony(self):
        profile = profile_of([((20, 0, 0), 0.5), ((80, 0, 0), 0.5)])
        scheme = gray_scheme([20, 80])
        areas = ZoneAreas(proportions=[0.5, 0.5])
        params = ScoringParams()
        expected = similarity_score(scheme, profile, areas, params) * harmony_score(scheme.colors)
        assert aesthetic_score(scheme, profile, areas, params) == pytest.approx(expected)

    def test_range(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            scheme = TintScheme(
                colors=[
                    LabColor(rng.uniform(0, 100), rng.uniform(-60, 60), rng.uniform(-60, 60))
                    for _ in range(n)
                ]
            )
            profile = profile_of([((rng.uniform(0, 100), 0, 0), 1.0)])
            areas_raw = rng.dirichlet(np.ones(n))
            areas = ZoneAreas(proportions=list(areas_raw / areas_raw.sum()))
            score = aesthetic_score(scheme, profile, areas, ScoringParams())
            assert 0.0 <= score <= 1.0


class TestDiscrimination:
    def test_identical_colors_fail(self):
        scheme = TintScheme(colors=[LabColor(50, 0, 0), LabColor(50, 0, 0)])
        assert not discrimination_check(scheme, 1.0)

    def test_separated_colors_pass(self):
        scheme = gray_scheme([10, 40, 70])  # pairwise 30
        assert discrimination_check(scheme, 10.0)

    def test_boundary_inclusive(self):
        scheme = gray_scheme([50, 60])
        assert discrimination_check(scheme, 10.0)


class TestScoreReport:
    def test_fields_and_composites(self):
        scheme = gray_scheme([20, 40, 60, 80])
        profile = profile_of([((40, 0, 0), 1.0)])
        areas = ZoneAreas(proportions=[0.25] * 4)
        report = score_report(scheme, profile, areas, ConventionSpec(), ScoringParams(k=1))
        assert set(report) == {"f_g", "f_ap", "f_c", "F_s", "f_d", "harmony", "F_a"}
        assert report["F_s"] == pytest.approx(report["f_g"] * report["f_ap"] * report["f_c"])
        assert report["F_a"] == pytest.approx(report["f_d"] * report["harmony"])
        assert all(0.0 <= v <= 1.0 for v in report.values())


def _random_instance(rng):
    n = int(rng.integers(3, 10))
    labs = [
        (rng.uniform(5, 95), rng.uniform(-60, 60), rng.uniform(-60, 60)) for _ in range(n)
    ]
    mode = SchemeMode.GRADED if rng.random() < 0.5 else SchemeMode.CONTINUOUS
    n_dom = int(rng.integers(1, 6))
    dom_colors = [
        (rng.uniform(5, 95), rng.uniform(-60, 60), rng.uniform(-60, 60)) for _ in range(n_dom)
    ]
    dom_props = rng.dirichlet(np.ones(n_dom))
    dom_props = list(dom_props / dom_props.sum())
    S = 16
    area_len = n if mode is SchemeMode.GRADED else S
    areas = rng.dirichlet(np.ones(area_len))
    areas = list(areas / areas.sum())
    assignments = {}
    for zone in range(1, n + 1):
        if rng.random() < 0.3:
            assignments[zone] = (rng.uniform(5, 95), rng.uniform(-60, 60), rng.uniform(-60, 60))
    params = ScoringParams(
        k=int(rng.integers(1, 4)),
        t=1 if rng.random() < 0.5 else -1,
        aerial_enabled=bool(rng.random() < 0.7),
        ramp_samples=S,
    )
    return labs, mode, dom_colors, dom_props, areas, assignments, params


class TestOracleEquivalence:
    def test_hundred_random_instances(self):
        rng = np.random.default_rng(12345)
        for _ in range(100):
            labs, mode, dom_colors, dom_props, areas, assignments, params = _random_instance(rng)
            scheme = TintScheme(colors=[LabColor(*c) for c in labs], mode=mode)
            profile = profile_of(list(zip(dom_colors, dom_props)))
            zone_areas = ZoneAreas(proportions=areas)
            conv = ConventionSpec(
                assignments={z: LabColor(*c) for z, c in assignments.items()}
            )

            f_g = continuity_score(scheme, params)
            f_ap = aerial_score(scheme, params)
            f_c = convention_score(scheme, conv, params)
            f_d = similarity_score(scheme, profile, zone_areas, params)
            f_s = subjective_score(scheme, conv, params)

            assert f_g == pytest.approx(oracles.o_continuity(labs, params.k, params.t), abs=1e-9)
            assert f_ap == pytest.approx(
                oracles.o_aerial(labs, params.aerial_enabled), abs=1e-9
            )
            assert f_c == pytest.approx(
                oracles.o_convention(labs, assignments, params.gamma), abs=1e-9
            )
            assert f_d == pytest.approx(
                oracles.o_similarity(
                    labs, mode.value, dom_colors, dom_props, areas, params.alpha, params.ramp_samples
                ),
                abs=1e-9,
            )
            assert f_s == pytest.approx(
                oracles.o_subjective(
                    labs, params.k, params.t, assignments, params.gamma, params.aerial_enabled
                ),
                abs=1e-9,
            )
            # F_a composes the oracle similarity with the harmony component
            f_a = aesthetic_score(scheme, profile, zone_areas, params)
            assert f_a == pytest.approx(
                oracles.o_similarity(
                    labs, mode.value, dom_colors, dom_props, areas, params.alpha, params.ramp_samples
                )
                * harmony_score(scheme.colors),
                abs=1e-9,
            )
