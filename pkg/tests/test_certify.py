import math
import random
from fractions import Fraction

import pytest

from analytica.certify import (
    CertifyError,
    certify_near_plane,
    check_plane_analytic,
    pullback_through_centered_inversion,
    pullback_through_inversion,
    sample_spheres,
    sphere_scan,
    _valley_scan,
)
from analytica.geometry import AffinePlane2, GeometryError, norm_sq
from analytica.jsonio import dumps, scan_report_to_data
from analytica.oracle import builtin_counterexample, oracle_from_text

from conftest import rand_form, rand_point

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
XY = AffinePlane2((0, 0, 0), (E1, E2))


def poly_text(rng, n, d):
    f = rand_form(rng, n, d, bound=50)
    return " + ".join(
        f"({c.numerator}/{c.denominator})"
        + "".join(f"*x{i+1}^{e}" for i, e in enumerate(idx) if e)
        for idx, c in f.coefficients.items()
    ) or "0"


# ---------------------------------------------------------------------------
# plane checks


def test_polynomial_plane_check_is_exact():
    rng = random.Random(601)
    for _ in range(10):
        f = oracle_from_text(poly_text(rng, 3, rng.randint(1, 5)), 3)
        rep = check_plane_analytic(f, XY)
        assert rep.verdict == "pass"
        assert rep.residual == 0.0
        assert rep.mode == "exact"


def test_declared_degree_bound_is_enforced():
    f = oracle_from_text("x1^4", 3)
    with pytest.raises(CertifyError):
        check_plane_analytic(f, XY, degree_hint=2)


def test_parameter_validation():
    f = oracle_from_text("x1", 3)
    with pytest.raises(CertifyError):
        check_plane_analytic(f, XY, tol=0.0)
    with pytest.raises(CertifyError):
        check_plane_analytic(f, XY, fit_degree=1)


def test_rational_pass_and_report_fields():
    f = oracle_from_text("1/(2-x1)", 3)
    rep = check_plane_analytic(f, XY)
    assert rep.verdict == "pass"
    assert rep.mode == "float"
    assert rep.residual <= 1e-9
    assert rep.plane is XY
    assert bool(rep)


def test_pole_on_the_plane_is_caught():
    # the fit cannot reproduce a function with a pole at x1 = 1/20
    f = oracle_from_text("1/(x1 - 1/20)", 3)
    rep = check_plane_analytic(f, XY)
    assert rep.verdict in ("pole", "fail")
    assert rep.witness is not None
    assert not bool(rep)


def test_curve_counterexample_fails_plane_check():
    g = builtin_counterexample("curve-g")
    rep = check_plane_analytic(g, XY)
    assert rep.verdict in ("fail", "pole")
    assert rep.witness is not None
    assert not bool(rep)


def test_tolerance_monotone():
    # passing at a tight tolerance implies passing at a looser one
    f = oracle_from_text("1/(2-x1-x2)", 3)
    tight = check_plane_analytic(f, XY, tol=1e-10)
    loose = check_plane_analytic(f, XY, tol=1e-6)
    if tight.verdict == "pass":
        assert loose.verdict == "pass"
    assert loose.residual <= tight.residual + 1e-15


def test_valley_scan_finds_interior_blowup():
    # a denominator valley far sharper than the fit grid spacing
    f = oracle_from_text("1/((x1 - 1/64)^2 + x2^2 + 1/100000000000000)", 3)
    hit = _valley_scan(f, XY, 0.1, 1.0)
    assert hit is not None
    verdict, witness, magnitude = hit
    assert verdict in ("pole", "fail")
    assert magnitude > 1e6


def test_plane_translate_slices_of_hartogs():
    f = builtin_counterexample("hartogs-f")
    for c in (Fraction(1, 10), Fraction(1, 2)):
        plane = AffinePlane2((0, 0, c), (E1, E2))
        rep = check_plane_analytic(f, plane, window=c / 4)
        assert rep.verdict == "pass"
        assert rep.residual <= 1e-9


# ---------------------------------------------------------------------------
# pullbacks


def test_origin_pullback_identity():
    rng = random.Random(602)
    f = oracle_from_text("x1^2 + x2*x3", 3)
    for sphere in sample_spheres(3, 4, rng):
        g, plane = pullback_through_inversion(f, sphere)
        for _ in range(5):
            y = rand_point(rng, 3, bound=6)
            if all(v == 0 for v in y):
                continue
            x = tuple(v / norm_sq(y) for v in y)
            assert g.evaluate(y) == f.evaluate(x)


def test_centered_pullback_identity():
    rng = random.Random(603)
    f = oracle_from_text("x1 - x2^2", 3)
    for sphere in sample_spheres(3, 4, rng):
        p = next(
            q for q in sphere.sample_points(4, rng) if any(v != 0 for v in q)
        )
        g, plane = pullback_through_centered_inversion(f, sphere, p)
        for _ in range(5):
            y = rand_point(rng, 3, bound=6)
            if y == p:
                continue
            d = tuple(a - b for a, b in zip(y, p))
            x = tuple(b + v / norm_sq(d) for b, v in zip(p, d))
            assert g.evaluate(y) == f.evaluate(x)


def test_centered_pullback_needs_sphere_point():
    rng = random.Random(604)
    f = oracle_from_text("x1", 3)
    sphere = sample_spheres(3, 1, rng)[0]
    with pytest.raises(CertifyError):
        pullback_through_centered_inversion(f, sphere, (0, 0, 0))


# ---------------------------------------------------------------------------
# sphere scans


def test_polynomial_scan_sound_for_any_seed():
    rng = random.Random(605)
    for _ in range(4):
        f = oracle_from_text(poly_text(rng, 3, rng.randint(1, 4)), 3)
        report = sphere_scan(f, count=3, seed=rng.randrange(10**9))
        assert report.ok
        assert report.passed == report.checked == 3
        assert all(
            rep.residual == 0.0 for o in report.outcomes for _, rep in o.parts
        )


def test_rational_ball_function_passes():
    f = oracle_from_text("1/(2-x1)", 3)
    report = sphere_scan(f, count=5, seed=99)
    assert report.ok and report.passed == 5


def test_hartogs_fails_spheres():
    f = builtin_counterexample("hartogs-f")
    report = sphere_scan(f, count=3, seed=99)
    assert not report.ok
    assert report.failures
    fl = report.failures[0]
    assert fl.part in ("origin-inversion", "point-inversion")
    assert fl.verdict in ("fail", "pole")


def test_curve_fails_spheres():
    g = builtin_counterexample("curve-g")
    report = sphere_scan(g, count=4, seed=99)
    assert not report.ok
    assert report.failures


def test_scan_reports_identical_across_workers():
    f = oracle_from_text("1/(2-x1)", 3)
    a = sphere_scan(f, count=4, seed=123, workers=1)
    b = sphere_scan(f, count=4, seed=123, workers=3)
    assert dumps(scan_report_to_data(a)) == dumps(scan_report_to_data(b))


def test_scan_with_explicit_spheres():
    rng = random.Random(606)
    spheres = sample_spheres(3, 2, rng)
    f = oracle_from_text("x1*x2", 3)
    report = sphere_scan(f, spheres=spheres, seed=5)
    assert report.checked == 2 and report.ok
    # auto resolves to the exact path for a polynomial
    assert report.config["mode"] == "exact"


def test_scan_mode_exact_requires_polynomial():
    f = oracle_from_text("1/(2-x1)", 3)
    with pytest.raises(CertifyError):
        sphere_scan(f, count=2, seed=1, mode="exact")


def test_scan_validation():
    f = oracle_from_text("x1", 3)
    with pytest.raises(CertifyError):
        sphere_scan(f, count=0, seed=1)
    with pytest.raises(CertifyError):
        sphere_scan(f, count=2, seed=1, workers=0)


# ---------------------------------------------------------------------------
# certification near a plane


def test_certify_polynomial_near_plane():
    f = oracle_from_text("x1^2 + x2*x3", 3)
    rep = certify_near_plane(f, AffinePlane2((0, 0, 0), (E2, E3)), seed=7)
    assert rep.verdict == "pass"
    assert rep.cone_residual == 0.0
    assert rep.config["mode"] == "exact"
    assert bool(rep)


def test_certify_translated_slice_of_hartogs():
    f = builtin_counterexample("hartogs-f")
    plane = AffinePlane2((Fraction(0), Fraction(0), Fraction(1, 10)), (E1, E2))
    rep = certify_near_plane(f, plane, seed=7)
    assert rep.verdict == "pass"
    assert rep.cone_residual <= 1e-9
    assert rep.sweep_residuals and all(r <= 1e-9 for r in rep.sweep_residuals)
    assert len(rep.tower.forms) == rep.order + 1


def test_certify_curve_counterexample_fails():
    g = builtin_counterexample("curve-g")
    rep = certify_near_plane(g, XY, seed=7)
    assert rep.verdict == "fail"
    assert rep.findings
    kinds = {fi.kind for fi in rep.findings}
    assert kinds & {"held-out", "jet-pole", "cone-residual", "singular", "plane"}
    assert not bool(rep)


def test_certify_validation():
    f = oracle_from_text("x1", 3)
    with pytest.raises(CertifyError):
        certify_near_plane(f, XY, order=-1, seed=1)
    with pytest.raises((CertifyError, GeometryError)):
        certify_near_plane(f, XY, theta=Fraction(2), seed=1)
    with pytest.raises(CertifyError):
        certify_near_plane(f, XY, eta=Fraction(0), seed=1)
