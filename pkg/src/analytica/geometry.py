"""Exact geometric predicates and maps: cones around a 2-plane, the
inversion x -> x/|x|^2, and the correspondence between spheres through
the origin and affine planes.

All predicates compare squared norms as rationals, so no square roots
are ever taken and answers are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import _linalg as la
from ._linalg import Fraction as _F  # noqa: F401  (re-export convenience)
from ._linalg import InconsistentSystemError, Mat, SingularMatrixError, Vec, frac, vec


class GeometryError(ValueError):
    pass


class DegenerateSphereError(GeometryError):
    pass


class PoleError(ZeroDivisionError):
    """Raised when a map is evaluated at a point where it is undefined."""

    def __init__(self, message: str, point: Sequence | None = None):
        super().__init__(message)
        self.point = tuple(point) if point is not None else None


def _as_point(p: Sequence) -> Vec:
    return vec(p)


def norm_sq(p: Sequence[Fraction]) -> Fraction:
    return la.dot(p, p)


def span_key(vectors: Sequence[Sequence]) -> tuple:
    """Canonical key identifying the linear span of the given vectors."""
    reduced, pivots = la.rref(la.mat(vectors))
    return tuple(reduced[i] for i in range(len(pivots)))


@dataclass(frozen=True)
class Hyperplane:
    """A linear hyperplane {x : normal . x = 0}, normal canonicalized so its
    first nonzero entry is 1."""

    normal: Vec

    def __post_init__(self) -> None:
        n = vec(self.normal)
        lead = next((x for x in n if x != 0), None)
        if lead is None:
            raise GeometryError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", tuple(x / lead for x in n))

    @property
    def dimension(self) -> int:
        return len(self.normal)

    def contains(self, p: Sequence) -> bool:
        return la.dot(self.normal, _as_point(p)) == 0

    def chart(self) -> Mat:
        """Deterministic rational basis of the hyperplane, as an n x (n-1)
        matrix of column vectors."""
        cols = la.nullspace((self.normal,))
        return tuple(zip(*cols))


@dataclass(frozen=True)
class VectorPlane2:
    """A 2-dimensional linear subspace given by two spanning vectors."""

    basis: tuple[Vec, Vec]

    def __post_init__(self) -> None:
        b = tuple(vec(v) for v in self.basis)
        if len(b) != 2 or len(b[0]) != len(b[1]):
            raise GeometryError("a 2-plane needs exactly two vectors of equal length")
        if la.rank(la.mat(b)) != 2:
            raise GeometryError("spanning vectors are linearly dependent")
        object.__setattr__(self, "basis", b)

    @property
    def dimension(self) -> int:
        return len(self.basis[0])

    def contains(self, p: Sequence) -> bool:
        m = la.mat(self.basis + (vec(p),))
        return la.rank(m) <= 2

    def span_key(self) -> tuple:
        return span_key(self.basis)


@dataclass(frozen=True)
class AffinePlane2:
    """An affine 2-plane: base point plus two spanning directions."""

    base_point: Vec
    basis: tuple[Vec, Vec]

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_point", vec(self.base_point))
        plane = VectorPlane2(self.basis)
        object.__setattr__(self, "basis", plane.basis)
        if len(self.base_point) != plane.dimension:
            raise GeometryError("base point dimension mismatch")

    @property
    def dimension(self) -> int:
        return len(self.base_point)

    def point_at(self, s, t) -> Vec:
        b1, b2 = self.basis
        return tuple(x + frac(s) * u + frac(t) * v for x, u, v in zip(self.base_point, b1, b2))

    def point_at_float(self, s: float, t: float) -> tuple[float, ...]:
        b1, b2 = self.basis
        return tuple(float(x) + s * float(u) + t * float(v) for x, u, v in zip(self.base_point, b1, b2))

    def direction_plane(self) -> VectorPlane2:
        return VectorPlane2(self.basis)

    def closest_point_to_origin(self) -> Vec:
        b = la.mat(self.basis)          # 2 x n, rows are directions
        gram = la.matmul(b, la.transpose(b))
        rhs = la.matvec(b, self.base_point)
        coeffs = la.solve(gram, tuple(-x for x in rhs))
        b1, b2 = self.basis
        return tuple(
            x + coeffs[0] * u + coeffs[1] * v for x, u, v in zip(self.base_point, b1, b2)
        )

    def canonical(self) -> tuple:
        return (span_key(self.basis), self.closest_point_to_origin())


@dataclass(frozen=True)
class AffineLine:
    base_point: Vec
    direction: Vec

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_point", vec(self.base_point))
        d = vec(self.direction)
        if all(x == 0 for x in d):
            raise GeometryError("line direction must be nonzero")
        if len(d) != len(self.base_point):
            raise GeometryError("line dimension mismatch")
        object.__setattr__(self, "direction", d)

    def point_at(self, t) -> Vec:
        return tuple(x + frac(t) * u for x, u in zip(self.base_point, self.direction))


@dataclass(frozen=True)
class Cone:
    """The open cone of directions within angular ratio theta of a 2-plane:
    points p with |orthogonal part of p| < theta * |p|.  The optional window
    radius bounds |p| when the cone is used as a local neighborhood."""

    axis: VectorPlane2
    theta: Fraction
    window: Fraction | None = None

    def __post_init__(self) -> None:
        t = frac(self.theta)
        if not (0 < t <= 1):
            raise GeometryError("cone aperture theta must satisfy 0 < theta <= 1")
        object.__setattr__(self, "theta", t)
        if self.window is not None:
            w = frac(self.window)
            if w <= 0:
                raise GeometryError("cone window must be positive")
            object.__setattr__(self, "window", w)

    @property
    def dimension(self) -> int:
        return self.axis.dimension


@dataclass(frozen=True)
class Ball:
    center: Vec
    radius: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", vec(self.center))
        r = frac(self.radius)
        if r <= 0:
            raise GeometryError("ball radius must be positive")
        object.__setattr__(self, "radius", r)

    def contains(self, p: Sequence) -> bool:
        d = tuple(frac(x) - c for x, c in zip(_as_point(p), self.center))
        return norm_sq(d) < self.radius * self.radius


def _orth_component_sq(axis: VectorPlane2, p: Vec) -> Fraction:
    """Squared norm of the component of p orthogonal to the axis plane."""
    b = la.mat(axis.basis)
    gram = la.matmul(b, la.transpose(b))
    rhs = la.matvec(b, p)
    coeffs = la.solve(gram, rhs)
    proj_sq = la.dot(coeffs, rhs)
    return norm_sq(p) - proj_sq


def in_cone(cone: Cone, p: Sequence) -> bool:
    """True iff the direction of p lies strictly within the cone aperture.
    The origin is a member by convention."""
    q = _as_point(p)
    if len(q) != cone.dimension:
        raise GeometryError("point dimension does not match the cone")
    n2 = norm_sq(q)
    if n2 == 0:
        return True
    orth2 = _orth_component_sq(cone.axis, q)
    return orth2 < cone.theta * cone.theta * n2


def plane_in_subcone(cone: Cone, axis: VectorPlane2, candidate: VectorPlane2) -> bool:
    """True iff candidate is a 2-plane inside the cone meeting the axis plane
    in at least a line.  Exact: the worst direction ratio is the largest
    generalized eigenvalue of a 2x2 rational pencil, compared against theta^2
    through its characteristic polynomial."""
    if axis.span_key() != cone.axis.span_key():
        raise GeometryError("axis argument does not span the cone axis")
    if candidate.dimension != cone.dimension:
        raise GeometryError("candidate plane dimension mismatch")
    joint = la.mat(axis.basis + candidate.basis)
    if la.rank(joint) > 3:
        return False  # intersection with the axis is trivial

    w1, w2 = (vec(v) for v in candidate.basis)
    b = la.mat(axis.basis)
    gram_axis = la.matmul(b, la.transpose(b))

    def orth_part(w: Vec) -> Vec:
        coeffs = la.solve(gram_axis, la.matvec(b, w))
        proj = tuple(
            coeffs[0] * u + coeffs[1] * v for u, v in zip(axis.basis[0], axis.basis[1])
        )
        return tuple(x - y for x, y in zip(w, proj))

    o1, o2 = orth_part(w1), orth_part(w2)
    m00, m01, m11 = la.dot(o1, o1), la.dot(o1, o2), la.dot(o2, o2)
    g00, g01, g11 = la.dot(w1, w1), la.dot(w1, w2), la.dot(w2, w2)
    a = g00 * g11 - g01 * g01            # det G > 0 for a rank-2 basis
    bq = -(m00 * g11 + m11 * g00 - 2 * m01 * g01)
    c = m00 * m11 - m01 * m01
    t = cone.theta * cone.theta
    # both generalized eigenvalues lie below t iff q(t) > 0 and t is right
    # of the parabola vertex
    return a * t * t + bq * t + c > 0 and 2 * a * t + bq > 0


def general_position(hyperplanes: Sequence[Hyperplane], n: int | None = None) -> bool:
    """True iff every subset of r <= n of the normals is linearly independent."""
    if not hyperplanes:
        raise GeometryError("general position of an empty family is undefined")
    if n is None:
        n = hyperplanes[0].dimension
    if any(h.dimension != n for h in hyperplanes):
        raise GeometryError("hyperplane dimensions disagree")
    r = min(len(hyperplanes), n)
    normals = [h.normal for h in hyperplanes]
    for subset in itertools.combinations(normals, r):
        if la.rank(la.mat(subset)) < r:
            return False
    return True


def invert_mu(x: Sequence) -> Vec:
    """The inversion x -> x / |x|^2; an involution away from the origin."""
    p = _as_point(x)
    n2 = norm_sq(p)
    if n2 == 0:
        raise PoleError("inversion is undefined at the origin", p)
    return tuple(c / n2 for c in p)


def invert_mu_centered(x: Sequence, center: Sequence) -> Vec:
    """Inversion centered at a point: mu_p(x) = mu(x - p) + p."""
    p = _as_point(center)
    q = _as_point(x)
    if len(p) != len(q):
        raise GeometryError("point and center dimensions disagree")
    diff = tuple(a - b for a, b in zip(q, p))
    inv = invert_mu(diff)
    return tuple(a + b for a, b in zip(inv, p))


def level_surface_map(h, x: Sequence) -> Vec:
    """Map x -> x / h(x) for a polynomial-valued function h.

    Accepts anything with an .evaluate(point) method (forms, oracles) or a
    plain callable.  Raises PoleError where h vanishes.
    """
    p = _as_point(x)
    value = h.evaluate(p) if hasattr(h, "evaluate") else h(p)
    value = frac(value)
    if value == 0:
        raise PoleError("level function vanishes at the point", p)
    return tuple(c / value for c in p)


def tidy_plane_basis(b1: Sequence, b2: Sequence) -> tuple[Vec, Vec]:
    """Orthogonalize b2 against b1 and rescale both by powers of two so the
    squared norms land in [1, 4).  Keeps charts metrically honest while
    staying rational."""
    u = vec(b1)
    v = vec(b2)
    proj = la.dot(u, v) / la.dot(u, u)
    v = tuple(y - proj * x for x, y in zip(u, v))

    def rescale(w: Vec) -> Vec:
        n2 = norm_sq(w)
        if n2 == 0:
            raise GeometryError("cannot rescale a zero vector")
        s = Fraction(1)
        while n2 * s * s >= 4:
            s /= 2
        while n2 * s * s < 1:
            s *= 2
        return tuple(x * s for x in w)

    return rescale(u), rescale(v)


@dataclass(frozen=True)
class SphereThroughOrigin:
    """The 2-sphere {x : |x|^2 = c . x} inside the 3-space spanned by
    `basis` (three vectors in R^n).  Degenerate when c annihilates the
    3-space."""

    c: Vec
    basis: tuple[Vec, Vec, Vec]

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", vec(self.c))
        b = tuple(vec(v) for v in self.basis)
        if len(b) != 3:
            raise GeometryError("a sphere needs a basis of exactly three vectors")
        if any(len(v) != len(self.c) for v in b):
            raise GeometryError("sphere basis dimension mismatch")
        if la.rank(la.mat(b)) != 3:
            raise DegenerateSphereError("sphere basis is rank-deficient")
        object.__setattr__(self, "basis", b)
        if all(la.dot(self.c, v) == 0 for v in b):
            raise DegenerateSphereError(
                "coefficient vector is orthogonal to the carrier 3-space"
            )

    @property
    def dimension(self) -> int:
        return len(self.c)

    def contains(self, p: Sequence) -> bool:
        q = _as_point(p)
        if la.rank(la.mat(self.basis + (q,))) > 3:
            return False
        return norm_sq(q) == la.dot(self.c, q)

    def canonical(self) -> tuple:
        """Span of the carrier space plus the action of c on its canonical
        basis; two spheres are the same set iff these agree."""
        reduced, pivots = la.rref(la.mat(self.basis))
        rows = tuple(reduced[i] for i in range(len(pivots)))
        return (rows, tuple(la.dot(self.c, r) for r in rows))

    def sample_points(self, count: int, rng) -> list[Vec]:
        """Rational points on the sphere, excluding the origin: each is the
        second intersection of a random rational line through 0."""
        g = la.matmul(la.mat(self.basis), la.transpose(la.mat(self.basis)))
        a = tuple(la.dot(self.c, v) for v in self.basis)
        out: list[Vec] = []
        while len(out) < count:
            m = tuple(Fraction(rng.randint(-9, 9)) for _ in range(3))
            if all(x == 0 for x in m):
                continue
            denom = la.dot(m, la.matvec(g, m))
            numer = la.dot(a, m)
            if numer == 0 or denom == 0:
                continue
            t = numer / denom
            u = tuple(t * x for x in m)
            out.append(tuple(
                u[0] * v0 + u[1] * v1 + u[2] * v2
                for v0, v1, v2 in zip(*self.basis)
            ))
        return out


def sphere_to_plane(sphere: SphereThroughOrigin) -> AffinePlane2:
    """Image of the sphere minus the origin under the inversion: the affine
    plane {y in span(basis) : c . y = 1}."""
    b = la.mat(sphere.basis)           # 3 x n rows
    gram = la.matmul(b, la.transpose(b))
    a = la.matvec(b, sphere.c)         # action of c in carrier coordinates
    if all(x == 0 for x in a):
        raise DegenerateSphereError("sphere is degenerate")
    # closest point of {a . u = 1} to the origin of the carrier space,
    # measured in ambient metric: minimize |W u|^2 subject to a . u = 1
    ginv_a = la.solve(gram, a)
    scale = la.dot(a, ginv_a)
    u0 = tuple(x / scale for x in ginv_a)
    kernel = la.nullspace((a,))
    if len(kernel) != 2:
        raise DegenerateSphereError("sphere carrier space is degenerate")

    def to_ambient(u: Vec) -> Vec:
        return tuple(
            u[0] * v0 + u[1] * v1 + u[2] * v2 for v0, v1, v2 in zip(*sphere.basis)
        )

    base = to_ambient(u0)
    d1, d2 = tidy_plane_basis(to_ambient(kernel[0]), to_ambient(kernel[1]))
    return AffinePlane2(base, (d1, d2))


def plane_to_sphere(plane: AffinePlane2, carrier_basis: Sequence[Sequence]) -> SphereThroughOrigin:
    """Inverse of sphere_to_plane: the sphere through the origin whose
    inversion image is the given plane inside span(carrier_basis).

    The returned coefficient vector is the canonical one lying in the
    carrier space.  Raises GeometryError when the plane passes through the
    origin or leaves the carrier space.
    """
    w = la.mat(carrier_basis)
    if len(w) != 3 or la.rank(w) != 3:
        raise GeometryError("carrier basis must consist of three independent vectors")
    gram = la.matmul(w, la.transpose(w))

    def carrier_coords(v: Vec) -> Vec:
        coords = la.solve(gram, la.matvec(w, v))
        back = tuple(
            coords[0] * a + coords[1] * b + coords[2] * c for a, b, c in zip(*w)
        )
        if back != tuple(v):
            raise GeometryError("plane does not lie inside the carrier space")
        return coords

    ub = carrier_coords(plane.base_point)
    k1 = carrier_coords(plane.basis[0])
    k2 = carrier_coords(plane.basis[1])
    try:
        a = la.solve(la.mat((k1, k2, ub)), (Fraction(0), Fraction(0), Fraction(1)))
    except (SingularMatrixError, InconsistentSystemError):
        raise GeometryError("plane passes through the origin; no sphere corresponds")
    m = la.solve(gram, a)
    c = tuple(m[0] * v0 + m[1] * v1 + m[2] * v2 for v0, v1, v2 in zip(*w))
    return SphereThroughOrigin(c, tuple(tuple(r) for r in w))
