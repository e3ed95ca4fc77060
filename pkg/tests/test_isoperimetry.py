"""Profiles, the associated integral H_a, and its inverse."""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import specbound as sb
from conftest import SQRT_4PI


def closed_form_aif(n, D, t):
    # integral_0^t s / (D s^{1-1/n})^2 ds = n t^{2/n} / (2 D^2)
    return n * t ** (2.0 / n) / (2.0 * D * D)


def test_power_law_eval():
    prof = sb.PowerLawProfile(2, SQRT_4PI)
    # sharp planar relation: H(pi) = sqrt(4 pi * pi) = 2 pi
    assert prof(math.pi) == pytest.approx(2 * math.pi, rel=1e-14)
    assert prof(0.0) == 0.0


def test_power_law_defaults_and_validation():
    assert sb.PowerLawProfile(2).D == pytest.approx(SQRT_4PI, rel=1e-15)
    with pytest.raises(sb.DomainError):
        sb.PowerLawProfile(3)          # no shipped constant above n = 2
    with pytest.raises(sb.DomainError):
        sb.PowerLawProfile(2, -1.0)
    with pytest.raises(sb.DomainError):
        sb.PowerLawProfile(1, 1.0)


def test_power_law_concave_increasing():
    prof = sb.PowerLawProfile(3, 1.7)
    s = np.logspace(-3, 3, 40)
    vals = np.array([prof(x) for x in s])
    assert np.all(np.diff(vals) > 0)
    mid = np.array([prof(0.5 * (a + b)) for a, b in zip(s, s[1:])])
    assert np.all(mid >= 0.5 * (vals[:-1] + vals[1:]) - 1e-12)


def test_model_profile_consistency(e2, h2):
    for model in (e2, h2):
        prof = sb.ModelProfile(model)
        for R in (0.7, 1.3, 2.4):
            v = sb.ball_volume(model, R)
            assert prof(v) == pytest.approx(sb.ball_area(model, R), rel=1e-9)
    assert sb.profile_eval(sb.ModelProfile(e2), 0.0) == 0.0


def test_model_profile_euclidean_equals_power_law(e2, e3):
    # area(V^{-1}(v)) on flat space collapses to n * w_n^{1/n} v^{1-1/n}
    for model in (e2, e3):
        n = model.dimension
        D = n * sb.unit_ball_volume(n) ** (1.0 / n)
        power = sb.PowerLawProfile(n, D)
        prof = sb.ModelProfile(model)
        for s in np.logspace(-3, 3, 13):
            assert prof(s) == pytest.approx(power(s), rel=1e-8)


def test_profile_domain_errors():
    prof = sb.PowerLawProfile(2)
    with pytest.raises(sb.DomainError):
        prof(-1.0)


def test_tabulated_profile_interpolates_and_guards():
    v = np.linspace(0.5, 10.0, 40)
    prof = sb.TabulatedProfile(v, np.sqrt(v))
    assert prof(2.0) == pytest.approx(math.sqrt(2.0), rel=1e-4)
    assert prof(0.0) == 0.0
    with pytest.raises(sb.DomainError):
        prof(0.2)          # below the first sample: no extrapolation
    with pytest.raises(sb.DomainError):
        prof(11.0)         # beyond the last sample
    assert prof(10.0) > 0  # domain end itself is queryable


def test_tabulated_profile_validation():
    with pytest.raises(sb.InvalidProfileError):
        sb.TabulatedProfile([1, 2, 2, 3], [1, 2, 3, 4])    # not increasing
    with pytest.raises(sb.InvalidProfileError):
        sb.TabulatedProfile([1, 2, 3, 4], [1, -2, 3, 4])   # nonpositive H
    with pytest.raises(sb.InvalidProfileError):
        sb.TabulatedProfile([1, 2], [1, 2])                # too few samples


def test_tabulated_csv_roundtrip(tmp_path):
    path = tmp_path / "profile.csv"
    s = np.linspace(1.0, 5.0, 9)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("s,H\n")
        for x in s:
            fh.write(f"{x},{math.sqrt(x)}\n")
    prof = sb.TabulatedProfile.from_csv(path)
    assert prof(3.0) == pytest.approx(math.sqrt(3.0), rel=1e-5)


def test_tabulated_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("volume,bound\n1,1\n2,2\n3,3\n4,4\n", encoding="utf-8")
    with pytest.raises(sb.InvalidProfileError):
        sb.TabulatedProfile.from_csv(path)


def test_aif_power_law_closed_form():
    for n, D in ((2, SQRT_4PI), (3, 1.0), (4, 2.0)):
        aif = sb.AifEvaluator(sb.PowerLawProfile(n, D))
        for t in np.logspace(-6, 6, 25):
            ref = closed_form_aif(n, D, t)
            assert abs(aif.value(t) - ref) <= 1e-8 * max(1.0, t ** (2.0 / n))
    aif2 = sb.AifEvaluator(sb.PowerLawProfile(2, SQRT_4PI))
    assert aif2.value(4 * math.pi) == pytest.approx(1.0, rel=1e-10)
    assert aif2.value(0.0) == 0.0


def test_aif_tabulated_hyperbolic_sharp(tab_h2, h2):
    # antiderivative of s/(4 pi s + s^2) is log((4 pi + t)/(4 pi)), which at
    # t = |B_R| collapses to 2 log cosh(R/2)
    aif = sb.AifEvaluator(tab_h2)
    for R in (0.5, 1.0, 2.0):
        t = sb.ball_volume(h2, R)
        ref = 2.0 * math.log(math.cosh(R / 2.0))
        assert aif.value(t) == pytest.approx(ref, rel=1e-6)
        assert aif.value(t) == pytest.approx(
            math.log((4 * math.pi + t) / (4 * math.pi)), rel=1e-6)


def test_aif_monotone_increasing(croke2_aif):
    ts = np.logspace(-4, 4, 30)
    vals = [croke2_aif.value(t) for t in ts]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_aif_domination(tab_h2):
    # smaller profile => larger associated integral, pointwise
    weaker = sb.AifEvaluator(sb.PowerLawProfile(2, SQRT_4PI))
    stronger = sb.AifEvaluator(tab_h2)
    for t in np.logspace(-4, 1, 15):
        assert weaker.value(t) >= stronger.value(t) * (1 - 1e-10)


def test_aif_inverse_power_law(croke2_aif):
    assert sb.aif_inverse(croke2_aif, 1.0) == pytest.approx(4 * math.pi, rel=1e-9)
    assert sb.aif_inverse(croke2_aif, 0.0) == 0.0
    for t in (0.1, 1.0, 10.0):
        y = sb.aif_eval(croke2_aif, t)
        assert sb.aif_inverse(croke2_aif, y) == pytest.approx(t, rel=1e-8)


def test_aif_inverse_range_error(tab_h2):
    aif = sb.AifEvaluator(tab_h2)
    top = aif.value(tab_h2.domain_end)
    with pytest.raises(sb.RangeError):
        aif.inverse(top * 1.5)


def test_aif_rejects_nonintegrable_head():
    # H ~ s^{1.5} near zero makes s/H^2 ~ s^{-2}: not integrable at 0
    s = np.logspace(-6, 1, 200)
    prof = sb.TabulatedProfile(s, s ** 1.5)
    aif = sb.AifEvaluator(prof)
    with pytest.raises(sb.InvalidProfileError):
        aif.value(1.0)


def test_aif_domain_checks(croke2_aif, tab_h2):
    with pytest.raises(sb.DomainError):
        croke2_aif.value(-1.0)
    aif = sb.AifEvaluator(tab_h2)
    with pytest.raises(sb.DomainError):
        aif.value(tab_h2.domain_end * 2.0)


def test_aif_model_profile_matches_power_law(e2):
    # flat model profile route (radius substitution) against the generic
    # quadrature route through the equivalent power law
    aif_model = sb.AifEvaluator(sb.ModelProfile(e2))
    aif_power = sb.AifEvaluator(sb.PowerLawProfile(2, SQRT_4PI))
    for t in (0.01, 0.5, 3.0, 40.0):
        assert aif_model.value(t) == pytest.approx(aif_power.value(t), rel=1e-8)


def test_aif_concurrent_queries_consistent(croke2):
    ts = list(np.logspace(-3, 3, 60))
    reference = sb.AifEvaluator(croke2)
    expected = [reference.value(t) for t in ts]
    shared = sb.AifEvaluator(croke2)
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(shared.value, ts))
    for a, b in zip(expected, got):
        assert b == pytest.approx(a, rel=1e-8)
