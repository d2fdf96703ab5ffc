"""Analyticity verdicts for restrictions of a function to planes and
2-spheres, and a certification routine for neighborhoods of a plane.

The plane check has two routes.  Polynomial functions are verified exactly:
the restriction is interpolated on a tensor grid of rational nodes and
re-checked on held-out nodes, so the reported residual is exactly zero.
Everything else goes through a float route: a total-degree Chebyshev fit
over a window, a held-out residual, and a falsifier that walks valleys of
the pulled-back denominator looking for blow-ups the fit grid missed.

Sphere restrictions are reduced to plane checks through inversions: one
centered at the origin (covering the sphere away from 0) and one centered
at a sphere point p (covering a neighborhood of 0 on the sphere).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _linalg as la
from ._linalg import frac, vec
from ._series import p_eval
from .forms import TaylorTower, tower_evaluate
from .geometry import (
    AffinePlane2,
    Cone,
    DegenerateSphereError,
    GeometryError,
    PoleError,
    SphereThroughOrigin,
    VectorPlane2,
    invert_mu,
    invert_mu_centered,
    norm_sq,
    sphere_to_plane,
    tidy_plane_basis,
)
from .interpolation import ConeSampleSet, lagrange_1d
from .oracle import (
    Add,
    Const,
    Div,
    Expression,
    FunctionOracle,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    degree_bound,
    evaluate_oracle,
    substitute,
    translate,
)
from .taylor import build_tower, line_convergence_radius

_FIT_GUARD = 4
_VALLEY_SCALES = 15
_BLOW_FACTOR = 1e6


class CertifyError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneReport:
    """Verdict for one plane: "pass", "fail" (finite disagreement or
    blow-up), or "pole" (a denominator vanished at a probed point).
    Pass always means the residual cleared the tolerance and no pole
    was encountered."""

    plane: AffinePlane2
    verdict: str
    residual: float
    witness: tuple | None
    mode: str
    fit_degree: int
    window: float
    detail: str = ""

    def __bool__(self) -> bool:
        return self.verdict == "pass"


# ---------------------------------------------------------------------------
# exact route: tensor interpolation of a known-polynomial restriction


def _exact_tensor_check(value_fn: Callable, degree: int, window: Fraction):
    """Interpolate value_fn on a (degree+1)^2 rational grid and re-check it
    on held-out nodes.  Returns None on agreement, else a witness (s, t)."""
    d = degree
    w = frac(window)
    nodes = [Fraction(0)] if d == 0 else [w * Fraction(2 * i - d, d) for i in range(d + 1)]
    values = [[value_fn(s, t) for t in nodes] for s in nodes]

    row_polys = [lagrange_1d(nodes, row) for row in values]
    cols = []
    for k in range(d + 1):
        column = [rp[k] if k < len(rp) else Fraction(0) for rp in row_polys]
        cols.append(lagrange_1d(nodes, column))

    def predicted(s: Fraction, t: Fraction) -> Fraction:
        acc = Fraction(0)
        tp = Fraction(1)
        for k in range(d + 1):
            acc += p_eval(cols[k], s) * tp
            tp *= t
        return acc

    offset = w * Fraction(1, 3 * (d + 1))
    check = [w * Fraction(2 * i - d, d + 1) + offset for i in range(d + 2)]
    for s in check:
        for t in check:
            if predicted(s, t) != value_fn(s, t):
                return (s, t)
    return None


# ---------------------------------------------------------------------------
# float route: Chebyshev fit plus denominator-valley falsifier


def _cheb_fit(f: FunctionOracle, plane: AffinePlane2, window: float, fit_degree: int):
    """Total-degree Chebyshev fit of the restriction over the window.
    Returns (status, residual, witness, grid_max); status is "ok" or
    "pole"."""
    total = fit_degree + _FIT_GUARD
    m = total + 3
    nodes = np.cos(np.pi * np.arange(m) / (m - 1))

    def sample_grid(xs: np.ndarray):
        svals, tvals, fvals = [], [], []
        for si in xs:
            for tj in xs:
                x = plane.point_at_float(window * si, window * tj)
                try:
                    v = float(evaluate_oracle(f, x, mode="float"))
                except PoleError:
                    return None, x
                if not math.isfinite(v):
                    return None, x
                svals.append(si)
                tvals.append(tj)
                fvals.append(v)
        return (np.array(svals), np.array(tvals), np.array(fvals)), None

    grid, bad = sample_grid(nodes)
    if grid is None:
        return "pole", math.inf, bad, 0.0
    ss, tt, fv = grid
    grid_max = float(np.max(np.abs(fv)))

    pairs = [(i, j) for i in range(total + 1) for j in range(total + 1 - i)]
    cs = np.polynomial.chebyshev.chebvander(ss, total)
    ct = np.polynomial.chebyshev.chebvander(tt, total)
    design = np.stack([cs[:, i] * ct[:, j] for i, j in pairs], axis=1)
    coef, *_ = np.linalg.lstsq(design, fv, rcond=None)
    cmat = np.zeros((total + 1, total + 1))
    for (i, j), c in zip(pairs, coef):
        cmat[i, j] = c
    node_resid = float(np.max(np.abs(design @ coef - fv)))

    mh = m + 2
    held_nodes = np.cos(np.pi * (2 * np.arange(mh) + 1) / (2 * mh))
    held, bad = sample_grid(held_nodes)
    if held is None:
        return "pole", math.inf, bad, grid_max
    hs, ht, hv = held
    pred = np.polynomial.chebyshev.chebval2d(hs, ht, cmat)
    errs = np.abs(pred - hv)
    k = int(np.argmax(errs))
    held_resid = float(errs[k])
    scale = max(1.0, grid_max, float(np.max(np.abs(hv))))
    residual = max(node_resid, held_resid) / scale
    witness = plane.point_at_float(window * float(hs[k]), window * float(ht[k]))
    return "ok", residual, witness, max(grid_max, float(np.max(np.abs(hv))))


class _ScanCap(Exception):
    pass


def _poly2_mul(a: np.ndarray, b: np.ndarray, cap: int) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    if out.shape[0] > cap or out.shape[1] > cap:
        raise _ScanCap
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            c = a[i, j]
            if c != 0.0:
                out[i : i + b.shape[0], j : j + b.shape[1]] += c * b
    return out


def _poly2_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r = max(a.shape[0], b.shape[0])
    c = max(a.shape[1], b.shape[1])
    out = np.zeros((r, c))
    out[: a.shape[0], : a.shape[1]] += a
    out[: b.shape[0], : b.shape[1]] += b
    return out


def _pullback_fraction(e: Expression, var_polys: list[np.ndarray], cap: int):
    """Float numerator/denominator coefficient arrays (in the chart
    coordinates s, t) for an expression pulled back to a plane."""
    one = np.ones((1, 1))

    def norm(pair):
        n, d = pair
        m = max(float(np.max(np.abs(n))), float(np.max(np.abs(d))))
        if m > 1e120 or (0.0 < m < 1e-120):
            n = n / m
            d = d / m
        return n, d

    def rec(node) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(node, Const):
            return np.array([[float(node.value)]]), one
        if isinstance(node, Var):
            return var_polys[node.index - 1], one
        if isinstance(node, Neg):
            n, d = rec(node.arg)
            return -n, d
        if isinstance(node, (Add, Sub)):
            n1, d1 = rec(node.left)
            n2, d2 = rec(node.right)
            t2 = _poly2_mul(n2, d1, cap)
            if isinstance(node, Sub):
                t2 = -t2
            return norm((_poly2_add(_poly2_mul(n1, d2, cap), t2), _poly2_mul(d1, d2, cap)))
        if isinstance(node, Mul):
            n1, d1 = rec(node.left)
            n2, d2 = rec(node.right)
            return norm((_poly2_mul(n1, n2, cap), _poly2_mul(d1, d2, cap)))
        if isinstance(node, Div):
            n1, d1 = rec(node.left)
            n2, d2 = rec(node.right)
            if not np.any(n2):
                raise _ScanCap
            return norm((_poly2_mul(n1, d2, cap), _poly2_mul(d1, n2, cap)))
        if isinstance(node, Pow):
            n, d = rec(node.base)
            rn, rd = one, one
            k = node.exponent
            while k:
                if k & 1:
                    rn, rd = norm((_poly2_mul(rn, n, cap), _poly2_mul(rd, d, cap)))
                k >>= 1
                if k:
                    n, d = norm((_poly2_mul(n, n, cap), _poly2_mul(d, d, cap)))
            return rn, rd
        raise TypeError(f"not an expression node: {node!r}")

    return rec(e)


def _golden_min(fn: Callable[[float], float], lo: float, hi: float, iters: int = 96) -> float:
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _valley_scan(f: FunctionOracle, plane: AffinePlane2, window: float, grid_max: float):
    """Walk minima of |denominator| along lines with one chart coordinate
    pinned to +-window/2^k and probe the function there.  Returns None, or
    ("fail"|"pole", witness, magnitude) on a blow-up.  The blow-up bar does
    not depend on the fit tolerance."""
    base = tuple(float(x) for x in plane.base_point)
    b1 = tuple(float(x) for x in plane.basis[0])
    b2 = tuple(float(x) for x in plane.basis[1])
    var_polys = [
        np.array([[base[i], b2[i]], [b1[i], 0.0]]) for i in range(len(base))
    ]
    try:
        _, den = _pullback_fraction(f.expression, var_polys, cap=65)
    except _ScanCap:
        return None
    if den.size == 1:
        return None

    blow = _BLOW_FACTOR * max(1.0, grid_max)
    pv = np.polynomial.polynomial.polyval2d
    grid = np.linspace(-window, window, 257)
    for axis in (0, 1):
        den_val = (lambda s, t: float(pv(s, t, den))) if axis == 0 else (
            lambda s, t: float(pv(t, s, den))
        )
        for sign in (1.0, -1.0):
            for k in range(_VALLEY_SCALES):
                pinned = sign * window * 0.5**k
                along = np.abs(pv(np.full_like(grid, pinned), grid, den)) if axis == 0 else np.abs(
                    pv(grid, np.full_like(grid, pinned), den)
                )
                i = int(np.argmin(along))
                lo = grid[max(i - 1, 0)]
                hi = grid[min(i + 1, len(grid) - 1)]
                u = _golden_min(lambda t: abs(den_val(pinned, t)), lo, hi)
                st = (pinned, u) if axis == 0 else (u, pinned)
                x = plane.point_at_float(st[0], st[1])
                try:
                    v = float(evaluate_oracle(f, x, mode="float"))
                except PoleError:
                    return ("pole", x, math.inf)
                if not math.isfinite(v):
                    return ("pole", x, math.inf)
                if abs(v) > blow:
                    return ("fail", x, abs(v))
    return None


def check_plane_analytic(
    f: FunctionOracle,
    plane: AffinePlane2,
    *,
    tol: float = 1e-9,
    fit_degree: int = 12,
    window=Fraction(1, 10),
    degree_hint="auto",
    scan: bool = True,
) -> PlaneReport:
    """Is the restriction of f to the plane real-analytic over the window?

    Polynomial functions (detected automatically, or declared through an
    integer `degree_hint`) are settled exactly with residual 0.  Otherwise a
    Chebyshev fit of total degree `fit_degree` (plus guard terms) must
    reproduce held-out samples within `tol` relative error, and a
    denominator-valley falsifier gets a chance to disprove the fit's verdict.
    A pass is a diagnostic at this window and resolution, never a proof.
    """
    if not isinstance(f, FunctionOracle):
        raise CertifyError("the function must be an expression-backed oracle")
    if plane.dimension != f.dimension:
        raise CertifyError("plane and function dimensions differ")
    if tol <= 0:
        raise CertifyError("tol must be positive")
    if fit_degree < 2:
        raise CertifyError("fit_degree must be at least 2")
    bound = degree_bound(f.expression) if degree_hint == "auto" else degree_hint
    if bound is not None:
        if bound < 0:
            raise CertifyError("degree_hint must be nonnegative")
        w = frac(window)
        if w <= 0:
            raise CertifyError("window must be positive")
        witness = _exact_tensor_check(lambda s, t: f.evaluate(plane.point_at(s, t)), bound, w)
        if witness is not None:
            raise CertifyError("declared polynomial degree bound is violated on this plane")
        return PlaneReport(plane, "pass", 0.0, None, "exact", bound, float(w))

    wf = float(window)
    if not (wf > 0 and math.isfinite(wf)):
        raise CertifyError("window must be positive and finite")
    status, residual, witness, grid_max = _cheb_fit(f, plane, wf, fit_degree)
    if status == "pole":
        return PlaneReport(
            plane, "pole", math.inf, witness, "float", fit_degree, wf,
            "denominator vanishes at a probed point",
        )
    if residual > tol:
        return PlaneReport(
            plane, "fail", residual, witness, "float", fit_degree, wf,
            "fit does not reproduce held-out samples",
        )
    if scan:
        hit = _valley_scan(f, plane, wf, grid_max)
        if hit is not None:
            verdict, where, magnitude = hit
            return PlaneReport(
                plane, verdict, magnitude, where, "float", fit_degree, wf,
                "blow-up along a denominator valley",
            )
    return PlaneReport(plane, "pass", residual, None, "float", fit_degree, wf)


# ---------------------------------------------------------------------------
# sphere restrictions via inversions


def _sum_of_squares(terms: list[Expression]) -> Expression:
    acc: Expression = terms[0]
    for t in terms[1:]:
        acc = Add(acc, t)
    return acc


def pullback_through_inversion(f: FunctionOracle, sphere: SphereThroughOrigin):
    """The composition f(mu(y)) with mu(y) = y/|y|^2, together with the
    plane that mu maps the sphere onto.  The plane stays away from the
    origin, so the pullback needs no guard of its own."""
    n = f.dimension
    if sphere.dimension != n:
        raise CertifyError("sphere and function dimensions differ")
    q = _sum_of_squares([Pow(Var(i), 2) for i in range(1, n + 1)])
    mapping = {i: Div(Var(i), q) for i in range(1, n + 1)}
    expr = substitute(f.expression, mapping)
    guard = None
    if f.guard is not None and any(x != 0 for x in f.guard[0]):
        guard = (invert_mu(f.guard[0]), f.guard[1])
    return FunctionOracle(expr, n, guard), sphere_to_plane(sphere)


def pullback_through_centered_inversion(
    f: FunctionOracle, sphere: SphereThroughOrigin, point: Sequence
):
    """The composition f(mu_p(y)) for the inversion centered at a sphere
    point p, with the plane mu_p maps the sphere onto.  The chart covers a
    neighborhood of the origin on the sphere: the plane's base point is the
    image of 0, and f's guard value is carried over to it."""
    n = f.dimension
    if sphere.dimension != n:
        raise CertifyError("sphere and function dimensions differ")
    p = vec(point)
    if all(x == 0 for x in p):
        raise CertifyError("the inversion center must not be the origin")
    if not sphere.contains(p):
        raise CertifyError("the inversion center must lie on the sphere")

    q = _sum_of_squares([Pow(Sub(Var(i), Const(p[i - 1])), 2) for i in range(1, n + 1)])
    mapping = {
        i: Add(Div(Sub(Var(i), Const(p[i - 1])), q), Const(p[i - 1]))
        for i in range(1, n + 1)
    }
    expr = substitute(f.expression, mapping)
    guard = None
    if f.guard is not None and tuple(f.guard[0]) != tuple(p):
        guard = (invert_mu_centered(f.guard[0], p), f.guard[1])

    ns = norm_sq(p)
    z0 = tuple(x - x / ns for x in p)
    c2p = tuple(ci - 2 * pi for ci, pi in zip(sphere.c, p))
    w = la.mat(sphere.basis)
    row = tuple(la.dot(c2p, v) for v in sphere.basis)
    kernel = la.nullspace((row,))
    if len(kernel) != 2:
        raise DegenerateSphereError("sphere direction space collapsed")

    def to_ambient(u):
        return tuple(u[0] * a + u[1] * b + u[2] * c for a, b, c in zip(*w))

    d1, d2 = tidy_plane_basis(to_ambient(kernel[0]), to_ambient(kernel[1]))
    return FunctionOracle(expr, n, guard), AffinePlane2(z0, (d1, d2))


def sample_spheres(dimension: int, count: int, rng: random.Random) -> list[SphereThroughOrigin]:
    """Random rational 2-spheres through the origin inside the unit ball: a
    random integer 3-space carrier and a rational coefficient vector scaled
    to |c| < 1 (the sphere's diameter is |c|)."""
    if dimension < 3:
        raise CertifyError("2-spheres need ambient dimension at least 3")
    out: list[SphereThroughOrigin] = []
    seen = set()
    while len(out) < count:
        if dimension == 3:
            basis = (vec((1, 0, 0)), vec((0, 1, 0)), vec((0, 0, 1)))
        else:
            basis = tuple(
                vec(rng.randint(-4, 4) for _ in range(dimension)) for _ in range(3)
            )
            if la.rank(la.mat(basis)) != 3:
                continue
        c = tuple(
            sum(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) * v[i] for v in basis)
            for i in range(dimension)
        )
        while norm_sq(c) >= 1:
            c = tuple(x / 2 for x in c)
        try:
            sphere = SphereThroughOrigin(c, basis)
        except DegenerateSphereError:
            continue
        key = sphere.canonical()
        if key in seen:
            continue
        seen.add(key)
        out.append(sphere)
    return out


@dataclass(frozen=True)
class SphereOutcome:
    sphere: SphereThroughOrigin
    parts: tuple[tuple[str, PlaneReport], ...]

    @property
    def ok(self) -> bool:
        return all(rep.verdict == "pass" for _, rep in self.parts)


@dataclass(frozen=True)
class ScanFailure:
    index: int
    sphere: SphereThroughOrigin
    part: str
    verdict: str
    witness: tuple | None
    residual: float


@dataclass(frozen=True)
class ScanReport:
    checked: int
    passed: int
    failures: tuple[ScanFailure, ...]
    skipped: tuple[str, ...]
    config: dict
    outcomes: tuple[SphereOutcome, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def _float_window(margin: float, basis) -> float:
    bmax = max(math.sqrt(float(norm_sq(b))) for b in basis)
    return margin / (6.0 * bmax)


def _scan_one(f, sphere, p, poly_degree, tol, fit_degree):
    """Check both inversion charts of one sphere.  `poly_degree` is the
    exact polynomial degree of f, or None for the float route."""
    g_far, plane_far = pullback_through_inversion(f, sphere)
    g_near, plane_near = pullback_through_centered_inversion(f, sphere, p)

    if poly_degree is not None:
        d = poly_degree

        def h_far(s, t):
            y = plane_far.point_at(s, t)
            q = norm_sq(y)
            x = tuple(yi / q for yi in y)
            return f.evaluate(x) * q**d

        def h_near(s, t):
            y = plane_near.point_at(s, t)
            dp = tuple(yi - pi for yi, pi in zip(y, p))
            q = norm_sq(dp)
            x = tuple(di / q + pi for di, pi in zip(dp, p))
            return f.evaluate(x) * q**d

        for name, h in (("origin-inversion", h_far), ("point-inversion", h_near)):
            if _exact_tensor_check(h, 2 * d, Fraction(1)) is not None:
                raise CertifyError(
                    f"cleared pullback is not a polynomial of the expected degree ({name})"
                )
        rep_far = PlaneReport(plane_far, "pass", 0.0, None, "exact", 2 * d, 1.0)
        rep_near = PlaneReport(plane_near, "pass", 0.0, None, "exact", 2 * d, 1.0)
        return SphereOutcome(sphere, (("origin-inversion", rep_far), ("point-inversion", rep_near)))

    margin_far = math.sqrt(float(norm_sq(plane_far.base_point)))
    margin_near = 1.0 / math.sqrt(float(norm_sq(sphere.c)))
    rep_far = check_plane_analytic(
        g_far, plane_far, tol=tol, fit_degree=fit_degree,
        window=_float_window(margin_far, plane_far.basis), degree_hint=None,
    )
    rep_near = check_plane_analytic(
        g_near, plane_near, tol=tol, fit_degree=fit_degree,
        window=_float_window(margin_near, plane_near.basis), degree_hint=None,
    )
    return SphereOutcome(sphere, (("origin-inversion", rep_far), ("point-inversion", rep_near)))


def sphere_scan(
    f: FunctionOracle,
    spheres: Sequence[SphereThroughOrigin] | None = None,
    *,
    count: int = 6,
    seed: int | None = None,
    rng: random.Random | None = None,
    tol: float = 1e-9,
    fit_degree: int = 12,
    workers: int = 1,
    mode: str = "auto",
) -> ScanReport:
    """Check f for analyticity on a family of 2-spheres through the origin.

    Every sphere is examined through two inversion charts so that the
    neighborhood of the origin is covered.  Results are deterministic for a
    fixed seed and independent of `workers` (parallelism only reorders the
    work, never the report).
    """
    if not isinstance(f, FunctionOracle):
        raise CertifyError("the function must be an expression-backed oracle")
    if f.dimension < 3:
        raise CertifyError("2-spheres need ambient dimension at least 3")
    if mode not in ("auto", "exact", "float"):
        raise CertifyError(f"unknown mode {mode!r}")
    if workers < 1:
        raise CertifyError("workers must be at least 1")
    if spheres is None and count < 1:
        raise CertifyError("count must be at least 1")
    if rng is None:
        rng = random.Random(0 if seed is None else seed)

    poly_degree = degree_bound(f.expression)
    if mode == "exact" and poly_degree is None:
        raise CertifyError("exact scan needs a polynomial function")
    if mode == "float":
        poly_degree = None

    if spheres is None:
        sphere_list = sample_spheres(f.dimension, count, rng)
    else:
        sphere_list = list(spheres)
        for s in sphere_list:
            if s.dimension != f.dimension:
                raise CertifyError("sphere dimension does not match the function")

    skipped: list[str] = []
    jobs = []
    for i, sphere in enumerate(sphere_list):
        try:
            p = sphere.sample_points(1, rng)[0]
            jobs.append((i, sphere, p))
        except GeometryError as exc:
            skipped.append(f"sphere {i}: {exc}")

    def run(job):
        i, sphere, p = job
        return i, _scan_one(f, sphere, p, poly_degree, tol, fit_degree)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            indexed = list(pool.map(run, jobs))
    else:
        indexed = [run(j) for j in jobs]
    indexed.sort(key=lambda pair: pair[0])
    outcomes = tuple(outcome for _, outcome in indexed)

    failures = []
    for i, outcome in indexed:
        for part, rep in outcome.parts:
            if rep.verdict != "pass":
                failures.append(
                    ScanFailure(i, outcome.sphere, part, rep.verdict, rep.witness, rep.residual)
                )
    config = {
        "count": len(sphere_list),
        "tol": tol,
        "fit_degree": fit_degree,
        "mode": "exact" if poly_degree is not None else "float",
        "seed": seed,
    }
    return ScanReport(
        len(outcomes),
        sum(1 for o in outcomes if o.ok),
        tuple(failures),
        tuple(skipped),
        config,
        outcomes,
    )


# ---------------------------------------------------------------------------
# certification near a plane


@dataclass(frozen=True)
class CertifyFinding:
    kind: str  # "jet-pole" | "held-out" | "singular" | "cone-pole" | "cone-residual" | "plane"
    degree: int | None
    witness: tuple | None
    detail: str


@dataclass(frozen=True)
class CertifyReport:
    """Certification evidence near a plane.  `cone_residual` is the worst
    disagreement between the tower and the function on samples of the cone
    window; `sweep_residuals` are the residuals of the swept plane checks.
    A pass requires every residual within tolerance and no findings."""

    verdict: str
    plane: AffinePlane2
    tower: TaylorTower
    order: int
    theta: Fraction
    eta: Fraction
    cone_residual: float
    sweep_residuals: tuple[float, ...]
    per_degree_residual: tuple[float, ...]
    findings: tuple[CertifyFinding, ...]
    plane_reports: tuple[PlaneReport, ...]
    cone_residuals: tuple[float, ...]
    line_radii: tuple[float, ...]
    config: dict

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def certify_near_plane(
    f: FunctionOracle,
    plane: AffinePlane2,
    *,
    order: int = 8,
    theta: Fraction = Fraction(3, 10),
    eta: Fraction = Fraction(1, 10),
    tol: float = 1e-9,
    seed: int | None = None,
    rng: random.Random | None = None,
    sweep: int = 3,
    fit_degree: int = 12,
    mode: str = "auto",
) -> CertifyReport:
    """Certify that f behaves analytically in a cone-shaped neighborhood of
    the plane's base point, fattened along the plane's directions.

    The base point of the plane is the expansion origin.  The evidence: a
    Taylor tower of the given order assembled from radial jets inside the
    cone of aperture theta and window eta (with held-out verification at
    each degree), agreement of the tower with f at scaled-down cone points,
    and analyticity checks on a sweep of nearby planes, each spanned by a
    fixed line of the plane at distance eta/2 from the origin and a
    perturbed off-plane point.  Violations are reported as findings with
    witnesses; configuration errors raise CertifyError.
    """
    if not isinstance(f, FunctionOracle):
        raise CertifyError("the function must be an expression-backed oracle")
    if plane.dimension != f.dimension:
        raise CertifyError("plane and function dimensions differ")
    if order < 0:
        raise CertifyError("order must be nonnegative")
    if sweep < 0:
        raise CertifyError("sweep count must be nonnegative")
    if tol <= 0:
        raise CertifyError("tol must be positive")
    if mode not in ("auto", "exact", "float"):
        raise CertifyError(f"unknown mode {mode!r}")
    eta = frac(eta)
    if eta <= 0:
        raise CertifyError("eta must be positive")
    if rng is None:
        rng = random.Random(0 if seed is None else seed)

    origin = plane.base_point
    f_loc = translate(f, origin)
    cone = Cone(plane.direction_plane(), frac(theta), eta)
    samples = ConeSampleSet(cone, rng)
    tower_mode = "float" if mode == "float" else "exact"
    tres = build_tower(f_loc, cone, order, mode=tower_mode, samples=samples, tol=tol)

    findings: list[CertifyFinding] = [
        CertifyFinding(fl.kind, fl.degree, fl.point, fl.detail) for fl in tres.failures
    ]

    cone_residuals: list[float] = []
    if tres.ok:
        pts = samples.plan(min(order, 2))[0][:4]
        poly_degree = degree_bound(f_loc.expression)
        must_vanish = tres.mode == "exact" and poly_degree is not None and poly_degree <= order
        # sample depths are well inside the window so that an order-R tower
        # of a function analytic at scale eta can actually reach tol
        for p in pts:
            for lam in (Fraction(1, 16), Fraction(1, 64)):
                x = tuple(lam * xi for xi in p)
                try:
                    fv = f_loc.evaluate(x)
                except PoleError as exc:
                    findings.append(
                        CertifyFinding("cone-pole", None, exc.point, "pole inside the cone window")
                    )
                    break
                tv = tower_evaluate(tres.tower, x)
                r = abs(float(fv - tv)) / max(1.0, abs(float(fv)))
                cone_residuals.append(r)
                disagree = (fv != tv) if must_vanish else (r > tol)
                if disagree:
                    findings.append(
                        CertifyFinding(
                            "cone-residual", None, tuple(map(float, x)),
                            "tower does not agree with the function inside the cone window",
                        )
                    )

    plane_reports: list[PlaneReport] = []
    if tres.ok and sweep > 0 and f.dimension >= 3:
        b1, b2 = plane.basis
        n = f.dimension
        fl1 = math.sqrt(float(norm_sq(b1)))
        c1 = eta / (2 * Fraction(math.ceil(fl1 * 16), 16))
        base = tuple(c1 * x for x in b1)
        off_axis = next(
            e for e in (tuple(1 if t == j else 0 for t in range(n)) for j in range(n))
            if la.rank(la.mat((b1, b2, vec(e)))) == 3
        )
        for k in range(sweep):
            delta = eta / 2 ** (k + 3)
            pk = tuple(delta * x for x in vec(off_axis))
            second = tuple(a - b for a, b in zip(pk, base))
            qk = AffinePlane2(base, (b2, second))
            bmax = max(math.sqrt(float(norm_sq(b))) for b in qk.basis)
            rep = check_plane_analytic(
                f_loc, qk, tol=tol, fit_degree=fit_degree,
                window=float(eta) / (16.0 * max(1.0, bmax)),
            )
            plane_reports.append(rep)
            if rep.verdict != "pass":
                findings.append(
                    CertifyFinding(
                        "plane", None, rep.witness, f"sweep plane {k}: {rep.verdict}"
                    )
                )

    line_radii: tuple[float, ...] = ()
    if tres.ok and order >= 4:
        pts = samples.plan(2)[0]
        line_radii = tuple(
            line_convergence_radius(tres.tower, tuple(map(float, p))) for p in pts[:3]
        )

    verdict = "pass" if not findings else "fail"
    config = {
        "order": order,
        "theta": frac(theta),
        "eta": eta,
        "tol": tol,
        "sweep": sweep,
        "fit_degree": fit_degree,
        "mode": tres.mode,
        "seed": seed,
    }
    return CertifyReport(
        verdict,
        plane,
        tres.tower,
        order,
        frac(theta),
        eta,
        max(cone_residuals, default=0.0),
        tuple(rep.residual for rep in plane_reports),
        tres.per_degree_residual,
        tuple(findings),
        tuple(plane_reports),
        tuple(cone_residuals),
        line_radii,
        config,
    )
