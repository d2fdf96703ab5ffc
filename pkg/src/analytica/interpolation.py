"""Exact recovery of forms from lower-dimensional data.

Three reconstruction routes live here:

* univariate and binary interpolation (`lagrange_1d`, `binary_form_from_lines`),
* gluing hyperplane restrictions into one ambient form (`glue_hyperplanes`),
* recovering a form from point samples on 2-planes inside a cone
  (`ConeSampleSet`, `reconstruct_form_from_cone`).

All rational paths are exact.  The float path of the cone reconstruction is
a least-squares fit with an explicit residual verdict instead of an error.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import _linalg as la
from ._linalg import Mat, Vec, frac, vec
from ._series import Poly, p_add, p_mul, p_normalize
from .forms import (
    DimensionMismatchError,
    HomogeneousForm,
    basis_size,
    compose_linear,
    constant_form,
    form_from_coefficients,
    linear_form,
    monomial_basis,
    multiply,
    zero_form,
)
from .geometry import (
    Cone,
    GeometryError,
    Hyperplane,
    VectorPlane2,
    general_position,
    norm_sq,
    plane_in_subcone,
)


class InterpolationError(ValueError):
    pass


class DivisibilityError(InterpolationError):
    """Exact division by a linear form left a nonzero remainder."""

    def __init__(self, message: str, remainder: HomogeneousForm | None = None):
        super().__init__(message)
        self.remainder = remainder


class GluingError(InterpolationError):
    pass


class ReconstructionError(InterpolationError):
    pass


# ---------------------------------------------------------------------------
# one- and two-variable interpolation


def lagrange_1d(nodes: Sequence, values: Sequence) -> Poly:
    """Coefficients (ascending) of the unique polynomial of degree
    < len(nodes) through the given points.  Exact, via Newton's divided
    differences."""
    xs = [frac(x) for x in nodes]
    ys = [frac(y) for y in values]
    if len(xs) != len(ys):
        raise InterpolationError("node and value counts differ")
    if not xs:
        raise InterpolationError("need at least one interpolation node")
    if len(set(xs)) != len(xs):
        raise InterpolationError("interpolation nodes must be distinct")

    # divided difference table, kept as the top row only
    table = list(ys)
    coeffs = [table[0]]
    for level in range(1, len(xs)):
        for i in range(len(xs) - level):
            table[i] = (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
        coeffs.append(table[0])

    poly: Poly = []
    basis: Poly = [Fraction(1)]
    for i, c in enumerate(coeffs):
        poly = p_add(poly, [c * b for b in basis])
        basis = p_mul(basis, [-xs[i], Fraction(1)])
    return p_normalize(poly)


def binary_form_from_lines(degree: int, lines: Sequence[Sequence], values: Sequence) -> HomogeneousForm:
    """The unique binary form of the given degree taking the prescribed
    values at the prescribed directions.

    At least degree + 1 pairwise non-proportional directions are required;
    any further samples are checked exactly against the solved form and a
    disagreement raises InterpolationError.
    """
    if degree < 0:
        raise InterpolationError("degree must be nonnegative")
    dirs = [vec(l) for l in lines]
    vals = [frac(v) for v in values]
    if len(dirs) != len(vals):
        raise InterpolationError("direction and value counts differ")
    if len(dirs) < degree + 1:
        raise InterpolationError(f"need at least {degree + 1} directions for degree {degree}")
    for p in dirs:
        if len(p) != 2:
            raise InterpolationError("directions must be 2-vectors")
        if p[0] == 0 and p[1] == 0:
            raise InterpolationError("the zero vector is not a direction")
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            if dirs[i][0] * dirs[j][1] == dirs[i][1] * dirs[j][0]:
                raise InterpolationError(f"directions {i} and {j} are proportional")

    basis = monomial_basis(2, degree)

    def row(p: Vec) -> tuple[Fraction, ...]:
        return tuple(p[0] ** e0 * p[1] ** e1 for e0, e1 in basis)

    square = la.mat(row(p) for p in dirs[: degree + 1])
    coeffs = la.solve(square, vals[: degree + 1])
    for p, v in zip(dirs[degree + 1 :], vals[degree + 1 :]):
        if la.dot(row(p), coeffs) != v:
            raise InterpolationError(
                "sample values are not consistent with a single form of this degree"
            )
    return form_from_coefficients(2, degree, coeffs)


# ---------------------------------------------------------------------------
# hyperplane restrictions and gluing


@dataclass(frozen=True)
class HyperplaneRestriction:
    """A form on a hyperplane, written in the coordinates of a chart.

    `chart` is an n x (n-1) matrix whose columns span the hyperplane;
    `form` has n-1 variables and equals the restricted function composed
    with the chart.
    """

    hyperplane: Hyperplane
    chart: Mat
    form: HomogeneousForm

    def __post_init__(self) -> None:
        n = self.hyperplane.dimension
        chart = la.mat(self.chart)
        if len(chart) != n or any(len(r) != n - 1 for r in chart):
            raise DimensionMismatchError(f"chart must be {n} x {n - 1}")
        if la.rank(chart) != n - 1:
            raise GeometryError("chart columns do not span the hyperplane")
        for j in range(n - 1):
            if sum(self.hyperplane.normal[i] * chart[i][j] for i in range(n)) != 0:
                raise GeometryError(f"chart column {j} does not lie on the hyperplane")
        if self.form.dimension != n - 1:
            raise DimensionMismatchError("restricted form must have n-1 variables")
        object.__setattr__(self, "chart", chart)

    @property
    def ambient_dimension(self) -> int:
        return self.hyperplane.dimension

    @property
    def degree(self) -> int:
        return self.form.degree

    def ambient_point(self, u: Sequence) -> Vec:
        """Chart coordinates -> point on the hyperplane."""
        uu = vec(u)
        return tuple(la.dot(r, uu) for r in self.chart)


def restriction_of(f: HomogeneousForm, hyperplane: Hyperplane, chart: Mat | None = None) -> HyperplaneRestriction:
    """Restrict an ambient form to a hyperplane, in the given chart
    (default: the hyperplane's own deterministic chart)."""
    if f.dimension != hyperplane.dimension:
        raise DimensionMismatchError("form and hyperplane dimensions differ")
    ch = hyperplane.chart() if chart is None else la.mat(chart)
    return HyperplaneRestriction(hyperplane, ch, compose_linear(f, ch))


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    failures: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_compatibility(restrictions: Sequence[HyperplaneRestriction]) -> CompatibilityReport:
    """Check that every pair of restrictions agrees on the intersection of
    its two hyperplanes.  Failures are reported as index pairs."""
    rs = list(restrictions)
    if not rs:
        return CompatibilityReport(True)
    n = rs[0].ambient_dimension
    d = rs[0].degree
    for r in rs[1:]:
        if r.ambient_dimension != n:
            raise DimensionMismatchError("mixed ambient dimensions")
        if r.degree != d:
            raise InterpolationError("mixed degrees in restriction list")

    failures: list[tuple[int, int]] = []
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            kernel = la.nullspace(la.mat((rs[i].hyperplane.normal, rs[j].hyperplane.normal)))
            if not kernel:
                # two distinct lines in the plane meet only at the origin
                if d == 0 and rs[i].form != rs[j].form:
                    failures.append((i, j))
                continue

            def pull(r: HyperplaneRestriction) -> HomogeneousForm:
                cols = [la.solve(r.chart, k) for k in kernel]
                m = tuple(tuple(c[row] for c in cols) for row in range(n - 1))
                return compose_linear(r.form, m)

            if pull(rs[i]) != pull(rs[j]):
                failures.append((i, j))
    return CompatibilityReport(not failures, tuple(failures))


def divide_by_linear(f: HomogeneousForm, linear: HomogeneousForm) -> HomogeneousForm:
    """Exact quotient f / linear as forms; DivisibilityError carries the
    remainder when the division is not exact."""
    if linear.dimension != f.dimension:
        raise DimensionMismatchError("divisor dimension mismatch")
    if linear.degree != 1 or linear.is_zero:
        raise InterpolationError("divisor must be a nonzero linear form")
    if f.degree < 1:
        raise InterpolationError("dividend must have degree at least 1")
    n, d = f.dimension, f.degree

    k = next(i for i in range(n) if linear.coefficients.get(tuple(1 if t == i else 0 for t in range(n)), 0) != 0)
    unit = tuple(1 if t == k else 0 for t in range(n))
    a = linear.coefficients[unit]
    rest = {idx: c for idx, c in linear.coefficients.items() if idx != unit}

    # split f into layers by the power of variable k
    layers: list[dict[tuple[int, ...], Fraction]] = [dict() for _ in range(d + 1)]
    for idx, c in f.coefficients.items():
        j = idx[k]
        key = idx[:k] + (0,) + idx[k + 1 :]
        layers[j][key] = c

    def mul_rest(layer: dict[tuple[int, ...], Fraction]) -> dict[tuple[int, ...], Fraction]:
        out: dict[tuple[int, ...], Fraction] = {}
        for m_idx, mc in rest.items():
            for idx, c in layer.items():
                key = tuple(x + y for x, y in zip(m_idx, idx))
                out[key] = out.get(key, Fraction(0)) + mc * c
        return out

    quot: list[dict[tuple[int, ...], Fraction]] = [dict() for _ in range(d)]
    quot[d - 1] = {idx: c / a for idx, c in layers[d].items()}
    for j in range(d - 1, 0, -1):
        carry = mul_rest(quot[j])
        layer = dict(layers[j])
        for idx, c in carry.items():
            layer[idx] = layer.get(idx, Fraction(0)) - c
        quot[j - 1] = {idx: c / a for idx, c in layer.items() if c}

    remainder = dict(layers[0])
    for idx, c in mul_rest(quot[0]).items():
        remainder[idx] = remainder.get(idx, Fraction(0)) - c
    remainder = {idx: c for idx, c in remainder.items() if c}
    if remainder:
        raise DivisibilityError(
            "form is not divisible by the given linear form",
            HomogeneousForm(n, d, remainder),
        )

    terms: dict[tuple[int, ...], Fraction] = {}
    for j, layer in enumerate(quot):
        for idx, c in layer.items():
            if c:
                terms[idx[:k] + (j,) + idx[k + 1 :]] = c
    return HomogeneousForm(n, d - 1, terms)


def glue_hyperplanes(restrictions: Sequence[HyperplaneRestriction], degree: int | None = None) -> HomogeneousForm:
    """Reassemble the unique ambient form of the given degree from its
    restrictions to degree + 1 hyperplanes in general position.

    Raises GluingError on bad configuration or incompatible data, and
    DivisibilityError if an inconsistency only surfaces inside the
    elimination.
    """
    rs = list(restrictions)
    if not rs:
        raise GluingError("no restrictions given")
    d = rs[0].degree if degree is None else degree
    if any(r.degree != d for r in rs):
        raise GluingError("all restrictions must share the target degree")
    n = rs[0].ambient_dimension
    if n < 2:
        raise GluingError("ambient dimension must be at least 2")
    if len(rs) != d + 1:
        raise GluingError(f"degree {d} needs exactly {d + 1} hyperplanes, got {len(rs)}")
    if not general_position([r.hyperplane for r in rs], n):
        raise GluingError("hyperplanes are not in general position")
    report = check_compatibility(rs)
    if not report:
        raise GluingError(f"restrictions disagree on pairwise intersections: {report.failures}")
    return _glue(rs, d)


def _glue(rs: list[HyperplaneRestriction], d: int) -> HomogeneousForm:
    n = rs[0].ambient_dimension
    if d == 0:
        value = next(iter(rs[0].form.coefficients.values()), Fraction(0))
        for r in rs[1:]:
            other = next(iter(r.form.coefficients.values()), Fraction(0))
            if other != value:
                raise GluingError("constant layers disagree; data is incompatible")
        return constant_form(n, value)

    first = rs[0]
    normal = first.hyperplane.normal
    # invertible frame: chart columns plus the normal direction
    frame = tuple(first.chart[i] + (normal[i],) for i in range(n))
    proj = la.inverse(frame)[: n - 1]
    extended = compose_linear(first.form, proj)
    lam = linear_form(normal)

    sub: list[HyperplaneRestriction] = []
    for r in rs[1:]:
        delta = r.form - compose_linear(extended, r.chart)
        ell = linear_form(tuple(la.dot(normal, tuple(row[j] for row in r.chart)) for j in range(n - 1)))
        if ell.is_zero:
            raise GluingError("a later hyperplane contains the first one's kernel direction")
        if delta.is_zero:
            quotient = zero_form(n - 1, d - 1)
        else:
            quotient = divide_by_linear(delta, ell)
        sub.append(HyperplaneRestriction(r.hyperplane, r.chart, quotient))
    return extended + multiply(lam, _glue(sub, d - 1))


# ---------------------------------------------------------------------------
# sampling planes inside a cone and reconstructing forms from values


def direction_pairs(count: int) -> list[tuple[int, int]]:
    """Deterministic list of pairwise non-proportional primitive integer
    pairs, starting (1,0), (0,1), (1,1), (1,-1), (2,1), (1,2), ..."""
    pairs = [(1, 0), (0, 1), (1, 1), (1, -1)]
    h = 2
    while len(pairs) < count:
        for a in range(1, h):
            if math.gcd(h, a) == 1:
                pairs.extend([(h, a), (a, h), (h, -a), (a, -h)])
        h += 1
    return pairs[:count]


def _integer_direction(v: Vec) -> tuple[int, ...]:
    den = la.common_denominator(v)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    return tuple(x // max(g, 1) for x in ints)


class ConeSampleSet:
    """Deterministic rational sample points on 2-planes inside a cone.

    Each plane passes through a line of the cone's axis plane and carries a
    stream of points i*a + j*b over primitive (i, j) pairs, rescaled into
    the cone window when one is set.  Streams are prefix-stable: asking for
    more planes or more points never changes earlier ones, so per-point
    work (for instance jets along rays) can be cached across degrees.
    """

    def __init__(self, cone: Cone, rng: random.Random, scale_doublings: int = 64):
        self.cone = cone
        self.rng = rng
        self.scale_doublings = scale_doublings
        self._w1 = _integer_direction(cone.axis.basis[0])
        self._w2 = _integer_direction(cone.axis.basis[1])
        self._spans: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        self._points: list[list[Vec]] = []
        self._pairs = direction_pairs(64)

    @property
    def dimension(self) -> int:
        return self.cone.dimension

    def plane_count(self) -> int:
        return len(self._spans)

    def plane(self, index: int) -> VectorPlane2:
        self.ensure_planes(index + 1)
        a, b = self._spans[index]
        return VectorPlane2((vec(a), vec(b)))

    def ensure_planes(self, count: int) -> None:
        while len(self._spans) < count:
            self._spans.append(self._draw_plane(len(self._spans)))
            self._points.append([])

    def _draw_plane(self, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        n = self.dimension
        k1, k2 = self._pairs[index % len(self._pairs)]
        m1, m2 = self._pairs[(index + 1) % len(self._pairs)]
        a = tuple(k1 * x + k2 * y for x, y in zip(self._w1, self._w2))
        m = tuple(m1 * x + m2 * y for x, y in zip(self._w1, self._w2))
        if n == 2:
            return a, m

        axis = self.cone.axis
        for _ in range(32):
            u = tuple(self.rng.randint(-3, 3) for _ in range(n))
            if la.rank(la.mat((vec(self._w1), vec(self._w2), vec(u)))) != 3:
                continue
            s = 1
            for _ in range(self.scale_doublings):
                b = tuple(s * mi + ui for mi, ui in zip(m, u))
                if la.rank(la.mat((vec(a), vec(b)))) == 2 and plane_in_subcone(
                    self.cone, axis, VectorPlane2((vec(a), vec(b)))
                ):
                    return a, b
                s *= 2
        raise ReconstructionError("could not tilt a sample plane into the cone")

    def _scale_into_window(self, p: tuple[int, ...]) -> Vec:
        q = vec(p)
        w = self.cone.window
        if w is None:
            return q
        bound = w * w / 4
        while norm_sq(q) > bound:
            q = tuple(x / 2 for x in q)
        return q

    def points_on_plane(self, index: int, count: int) -> list[Vec]:
        self.ensure_planes(index + 1)
        a, b = self._spans[index]
        stream = self._points[index]
        while len(stream) < count:
            if len(stream) >= len(self._pairs):
                self._pairs = direction_pairs(2 * len(self._pairs))
            i, j = self._pairs[len(stream)]
            raw = tuple(i * x + j * y for x, y in zip(a, b))
            stream.append(self._scale_into_window(raw))
        return stream[:count]

    def plan(self, degree: int, extra_per_plane: int = 2) -> tuple[list[Vec], list[Vec]]:
        """Design points for one exactly-determined degree-`degree` solve,
        plus held-out points for verification.

        Design points are picked greedily by exact rank of their monomial
        rows, so the square system is nonsingular whenever enough planes are
        available.  A single plane only ever contributes degree+1 useful
        points (its restriction space is that small), and in dimension 3 the
        product of the plane equations caps the usable rank, hence the two
        lower bounds on the plane count.  Every skipped or surplus point is
        held out for verification.
        """
        n = self.dimension
        need = basis_size(n, degree)
        per = degree + 1
        planes = max(2, math.ceil(need / per) + 1, self.plane_count())
        if n == 3:
            planes = max(planes, degree + 1)
        self.ensure_planes(planes)
        basis = monomial_basis(n, degree)
        streams = [self.points_on_plane(i, per + extra_per_plane) for i in range(planes)]
        design: list[Vec] = []
        held: list[Vec] = []
        pivots: list[list[Fraction]] = []
        for level in range(per + extra_per_plane):
            for s in streams:
                p = s[level]
                if len(design) >= need:
                    held.append(p)
                    continue
                row = [math.prod(x**e for x, e in zip(p, idx)) for idx in basis]
                for piv in pivots:
                    lead = next(i for i, c in enumerate(piv) if c != 0)
                    if row[lead] != 0:
                        factor = row[lead] / piv[lead]
                        row = [a - factor * b for a, b in zip(row, piv)]
                if any(c != 0 for c in row):
                    pivots.append(row)
                    design.append(p)
                else:
                    held.append(p)
        return design, held

    def add_planes(self, count: int) -> None:
        self.ensure_planes(self.plane_count() + count)


@dataclass(frozen=True)
class ReconstructionResult:
    """Outcome of a cone reconstruction.  `ok` is False when held-out
    samples disagree with the solved form, i.e. the sampled values do not
    come from any single form of the requested degree on this cone."""

    form: HomogeneousForm
    ok: bool
    max_residual: float
    witness: Vec | None
    degree: int
    mode: str
    planes_used: int

    def __bool__(self) -> bool:
        return self.ok


def reconstruct_form_from_cone(
    value_fn: Callable[[Vec], object],
    cone: Cone,
    degree: int,
    *,
    mode: str = "exact",
    samples: ConeSampleSet | None = None,
    rng: random.Random | None = None,
    seed: int | None = None,
    tol: float = 1e-9,
    max_retries: int = 8,
) -> ReconstructionResult:
    """Recover the homogeneous form of the given degree from point values
    inside a cone.

    The solve uses exactly basis_size(n, degree) samples spread over 2-planes
    through the cone axis; every further generated sample is held out and
    checked against the solution.  In exact mode the check is equality of
    rationals; in float mode it is a relative residual against `tol`.
    """
    if degree < 0:
        raise InterpolationError("degree must be nonnegative")
    if mode not in ("exact", "float"):
        raise InterpolationError(f"unknown mode {mode!r}")
    if samples is None:
        if rng is None:
            rng = random.Random(0 if seed is None else seed)
        samples = ConeSampleSet(cone, rng)
    n = samples.dimension
    basis = monomial_basis(n, degree)

    need = basis_size(n, degree)
    for attempt in range(max_retries + 1):
        design, held = samples.plan(degree)
        if len(design) < need:
            samples.add_planes(2)
            continue
        if mode == "exact":
            rows = la.mat(tuple(math.prod(x**e for x, e in zip(p, idx)) for idx in basis) for p in design)
            rhs = [frac(value_fn(p)) for p in design]
            try:
                coeffs = la.solve(rows, rhs)
            except la.SingularMatrixError:
                samples.add_planes(2)
                continue
            form = form_from_coefficients(n, degree, coeffs)
            worst = 0.0
            witness = None
            for p in held:
                r = form.evaluate(p) - frac(value_fn(p))
                if r != 0 and (witness is None or abs(float(r)) > worst):
                    worst = abs(float(r))
                    witness = p
            return ReconstructionResult(
                form, witness is None, worst, witness, degree, mode, samples.plane_count()
            )

        import numpy as np

        fd = [tuple(map(float, p)) for p in design]
        a = np.array([[math.prod(x**e for x, e in zip(p, idx)) for idx in basis] for p in fd])
        rhs_v = np.array([float(value_fn(p)) for p in design])
        sol, _, rank_, _ = np.linalg.lstsq(a, rhs_v, rcond=None)
        if rank_ < len(basis):
            samples.add_planes(2)
            continue
        form = form_from_coefficients(n, degree, [Fraction(float(c)) for c in sol])
        pts = design + held
        vals = [float(value_fn(p)) for p in pts]
        scale = max(1.0, max(abs(v) for v in vals))
        worst = 0.0
        witness = None
        for p, v in zip(pts, vals):
            fp = tuple(map(float, p))
            pred = sum(c * math.prod(x**e for x, e in zip(fp, idx)) for c, idx in zip(sol, basis))
            r = abs(pred - v) / scale
            if r > worst:
                worst = r
                witness = p
        ok = worst <= tol
        return ReconstructionResult(form, ok, worst, None if ok else witness, degree, mode, samples.plane_count())

    raise ReconstructionError(f"sample matrix stayed singular after {max_retries} retries")
