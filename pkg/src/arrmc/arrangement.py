"""Exact combinatorics of affine hyperplane arrangements.

Intersection posets, good-line detection, parallel subarrangements, shifted
families, cone/decone and fiber-point extraction.  All data is rational and
canonicalized, so equality of hyperplanes and flats is syntactic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, InternalError
from .linalg import (
    Matrix,
    Vector,
    dot,
    frac,
    from_columns,
    nullspace,
    rank,
    rref,
    vec,
)


def _canonical_form(coeffs: Vector, constant: Fraction) -> tuple[Vector, Fraction]:
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        raise InputError("hyperplane has zero linear part")
    return tuple(c / lead for c in coeffs), constant / lead


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Zero locus of an affine-linear form ``coeffs . x + constant``.

    Stored in canonical form (first nonzero coefficient equal to 1);
    equality and hashing ignore the label.
    """

    coeffs: Vector
    constant: Fraction
    label: str

    @staticmethod
    def make(coeffs, constant, label: str) -> "Hyperplane":
        c, a = _canonical_form(vec(coeffs), frac(constant))
        return Hyperplane(c, a, label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return self.coeffs == other.coeffs and self.constant == other.constant

    def __hash__(self) -> int:
        return hash((self.coeffs, self.constant))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def sort_key(self):
        return (self.coeffs, self.constant)

    def evaluate(self, point: Vector) -> Fraction:
        return dot(self.coeffs, point) + self.constant

    def linear_part(self, direction: Vector) -> Fraction:
        return dot(self.coeffs, direction)

    def is_parallel_to(self, y: "LineDirection") -> bool:
        return self.linear_part(y.direction) == 0

    def equation_row(self) -> Vector:
        """Augmented row (coeffs | rhs) of the equation ``coeffs . x = -constant``."""
        return self.coeffs + (-self.constant,)


@dataclass(frozen=True)
class Arrangement:
    ambient_dim: int
    hyperplanes: tuple[Hyperplane, ...]

    def __post_init__(self):
        labels = [h.label for h in self.hyperplanes]
        if len(set(labels)) != len(labels):
            raise InputError("duplicate hyperplane labels")
        if len(set(self.hyperplanes)) != len(self.hyperplanes):
            raise InputError("duplicate hyperplanes (equal canonical forms)")
        for h in self.hyperplanes:
            if h.dim != self.ambient_dim:
                raise InputError(
                    f"hyperplane {h.label} lives in dimension {h.dim}, "
                    f"arrangement in {self.ambient_dim}"
                )

    @staticmethod
    def make(dim: int, hyperplanes) -> "Arrangement":
        return Arrangement(dim, tuple(hyperplanes))

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def by_label(self, label: str) -> Hyperplane:
        for h in self.hyperplanes:
            if h.label == label:
                return h
        raise InputError(f"no hyperplane labeled {label!r}")

    def labels(self) -> tuple[str, ...]:
        return tuple(h.label for h in self.hyperplanes)

    def sorted_hyperplanes(self) -> list[Hyperplane]:
        return sorted(self.hyperplanes, key=Hyperplane.sort_key)

    def canonical_set(self) -> frozenset[tuple[Vector, Fraction]]:
        return frozenset((h.coeffs, h.constant) for h in self.hyperplanes)

    def same_hyperplanes(self, other: "Arrangement") -> bool:
        return (
            self.ambient_dim == other.ambient_dim
            and self.canonical_set() == other.canonical_set()
        )

    def is_central(self) -> bool:
        return all(h.constant == 0 for h in self.hyperplanes)


@dataclass(frozen=True)
class Flat:
    """An element of the intersection poset, canonically presented.

    ``rows`` is the reduced row echelon form of the augmented system
    (A | b) with solution set the flat; ``rank`` is the codimension and
    equals the number of rows.  Equality is equality of canonical forms.
    """

    ambient_dim: int
    rows: Matrix
    containing: frozenset[str] = field(compare=False)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def sort_key(self):
        return self.rows

    def coefficient_rows(self) -> Matrix:
        return tuple(r[:-1] for r in self.rows)

    def point(self) -> Vector:
        """Canonical point: free variables zero, pivots from the rhs."""
        x = [Fraction(0)] * self.ambient_dim
        _, pivots = rref(self.coefficient_rows()) if self.rows else ((), ())
        for r, p in zip(self.rows, pivots):
            x[p] = r[-1]
        return tuple(x)

    def directions(self) -> list[Vector]:
        """Basis of the direction space (kernel of the linear part)."""
        if not self.rows:
            return nullspace((), self.ambient_dim)
        return nullspace(self.coefficient_rows())

    def contains_point(self, p: Vector) -> bool:
        return all(dot(r[:-1], p) == r[-1] for r in self.rows)

    def contains_flat(self, other: "Flat") -> bool:
        """True iff ``other`` is a subset of this flat (both nonempty)."""
        if not self.rows:
            return True
        stacked = other.rows + self.rows
        return rank(stacked) == other.rank

    def contains_hyperplane_locus(self, h: Hyperplane) -> bool:
        """True iff the flat is contained in the hyperplane ``h``."""
        stacked = self.rows + (h.equation_row(),)
        return rank(stacked) == self.rank


def _flat_from_augmented(dim: int, rows: Matrix, arr: Arrangement | None = None) -> Flat | None:
    """Canonicalize an augmented system; None when inconsistent (empty flat)."""
    red, pivots = rref(rows)
    if dim in pivots:
        return None
    containing: frozenset[str] = frozenset()
    flat = Flat(dim, red, containing)
    if arr is not None:
        containing = frozenset(
            h.label for h in arr.hyperplanes if flat.contains_hyperplane_locus(h)
        )
        flat = Flat(dim, red, containing)
    return flat


def whole_space_flat(arr: Arrangement) -> Flat:
    return Flat(arr.ambient_dim, (), frozenset())


@dataclass(frozen=True)
class IntersectionPoset:
    """Flats grouped by rank with cover relations by inclusion."""

    arrangement: Arrangement
    by_rank: tuple[tuple[Flat, ...], ...]
    covers: tuple[tuple[Flat, Flat], ...]

    def flats(self, rank: int | None = None) -> tuple[Flat, ...]:
        if rank is None:
            return tuple(f for stratum in self.by_rank for f in stratum)
        if rank < 0 or rank >= len(self.by_rank):
            return ()
        return self.by_rank[rank]

    def contains(self, flat: Flat) -> bool:
        r = flat.rank
        return r < len(self.by_rank) and flat in set(self.by_rank[r])

    def rank_two(self) -> tuple[Flat, ...]:
        return self.flats(2)


def build_intersection_poset(arr: Arrangement) -> IntersectionPoset:
    """All nonempty intersections of hyperplanes, deduplicated and ranked.

    Breadth-first closure: each flat of rank r is intersected with every
    hyperplane; empty and unchanged results are discarded.  Equivalent to
    enumerating all subsets because every rank r+1 flat is some rank r flat
    cut by one more hyperplane.
    """
    dim = arr.ambient_dim
    strata: list[list[Flat]] = [[whole_space_flat(arr)]]
    seen: set[Matrix] = {()}
    frontier = strata[0]
    while frontier:
        nxt: dict[Matrix, Flat] = {}
        for flat in frontier:
            for h in arr.hyperplanes:
                cand = _flat_from_augmented(dim, flat.rows + (h.equation_row(),), arr)
                if cand is None or cand.rank == flat.rank:
                    continue
                if cand.rows not in seen and cand.rows not in nxt:
                    nxt[cand.rows] = cand
        frontier = sorted(nxt.values(), key=Flat.sort_key)
        if frontier:
            strata.append(frontier)
            seen.update(nxt)
    by_rank = tuple(tuple(sorted(s, key=Flat.sort_key)) for s in strata)
    covers = []
    for r in range(len(by_rank) - 1):
        for f in by_rank[r]:
            for g in by_rank[r + 1]:
                if f.contains_flat(g):
                    covers.append((f, g))
    return IntersectionPoset(arr, by_rank, tuple(covers))


@dataclass(frozen=True)
class LineDirection:
    """A line through the origin given by its direction vector, canonicalized."""

    direction: Vector

    @staticmethod
    def make(direction) -> "LineDirection":
        d = vec(direction)
        lead = next((c for c in d if c != 0), None)
        if lead is None:
            raise InputError("line direction must be nonzero")
        return LineDirection(tuple(c / lead for c in d))

    @property
    def dim(self) -> int:
        return len(self.direction)


def shift_flat_along(flat: Flat, y: LineDirection) -> Flat:
    """The flat X + Y: same points translated along the line direction."""
    dirs = flat.directions()
    extended = dirs + [y.direction]
    dir_rows = tuple(extended)
    normals = nullspace(dir_rows, flat.ambient_dim)
    p = flat.point()
    rows = tuple(w + (dot(w, p),) for w in normals)
    shifted = _flat_from_augmented(flat.ambient_dim, rows)
    if shifted is None:
        raise InternalError("shifting a flat produced an empty set")
    return shifted


def is_good_line(
    arr: Arrangement, y: LineDirection, poset: IntersectionPoset | None = None
) -> tuple[bool, Flat | None]:
    """Check X + Y in L(arr) for every rank-two flat X; witness on failure."""
    if y.dim != arr.ambient_dim:
        raise InputError("line direction dimension mismatch")
    if poset is None:
        poset = build_intersection_poset(arr)
    members = {f.rows for f in poset.flats()}
    for x in poset.rank_two():
        shifted = shift_flat_along(x, y)
        if shifted.rows not in members:
            return False, x
    return True, None


def parallel_subarrangement(
    arr: Arrangement, y: LineDirection
) -> tuple[list[Hyperplane], list[Hyperplane]]:
    """Split into (parallel to y, transverse to y); n = len(transverse)."""
    par = [h for h in arr.hyperplanes if h.is_parallel_to(y)]
    rest = [h for h in arr.hyperplanes if not h.is_parallel_to(y)]
    return par, rest


def shifted_family(arr: Arrangement, y: LineDirection) -> list[Hyperplane]:
    """Hyperplanes X + Y for X ranging over rank-two flats transverse to y.

    Deduplicated by canonical form.  Labels reuse the matching hyperplane of
    ``arr`` when the shift lands inside it, otherwise fresh ``S#`` labels.
    """
    _, rest = parallel_subarrangement(arr, y)
    if len(rest) < 2:
        return []
    sub = Arrangement.make(arr.ambient_dim, rest)
    poset = build_intersection_poset(sub)
    found: dict[tuple[Vector, Fraction], Hyperplane] = {}
    existing = {(h.coeffs, h.constant): h for h in arr.hyperplanes}
    counter = 0
    for x in poset.rank_two():
        shifted = shift_flat_along(x, y)
        if shifted.rank != 1:
            raise InternalError("rank-two flat transverse to the line must shift to a hyperplane")
        row = shifted.rows[0]
        coeffs, constant = _canonical_form(row[:-1], -row[-1])
        key = (coeffs, constant)
        if key in found:
            continue
        if key in existing:
            found[key] = existing[key]
        else:
            counter += 1
            found[key] = Hyperplane(coeffs, constant, f"S{counter}")
    return sorted(found.values(), key=Hyperplane.sort_key)


def cone(arr: Arrangement, origin_label: str = "H0") -> Arrangement:
    """Homogenize to a central arrangement one dimension up.

    Coordinates are (x0, x1, ..., xl); each form L + a becomes L + a*x0 and
    the hyperplane x0 = 0 is appended with ``origin_label``.
    """
    if any(h.label == origin_label for h in arr.hyperplanes):
        raise InputError(f"label {origin_label!r} already used")
    hs = [
        Hyperplane.make((h.constant,) + h.coeffs, 0, h.label)
        for h in arr.hyperplanes
    ]
    zero_h = Hyperplane.make((1,) + (0,) * arr.ambient_dim, 0, origin_label)
    return Arrangement.make(arr.ambient_dim + 1, hs + [zero_h])


def decone(arr: Arrangement) -> Arrangement:
    """Restrict a central arrangement containing x0 = 0 to the slice x0 = 1."""
    if not arr.is_central():
        raise InputError("decone requires a central arrangement")
    if arr.ambient_dim < 1:
        raise InputError("decone requires ambient dimension >= 1")
    x0 = Hyperplane.make((1,) + (0,) * (arr.ambient_dim - 1), 0, "_x0")
    if x0 not in set(arr.hyperplanes):
        raise InputError("decone requires the hyperplane x0 = 0")
    out = []
    for h in arr.hyperplanes:
        if h == x0:
            continue
        coeffs, constant = h.coeffs[1:], h.coeffs[0]
        if all(c == 0 for c in coeffs):
            raise InputError(f"hyperplane {h.label} degenerates at x0 = 1")
        out.append(Hyperplane.make(coeffs, constant, h.label))
    return Arrangement.make(arr.ambient_dim - 1, out)


# ---------------------------------------------------------------------------
# fiber extraction along a line direction


def transverse_basis(y: LineDirection) -> Matrix:
    """Invertible matrix whose last column is y, the rest standard vectors.

    Columns are chosen greedily in index order, so the change of coordinates
    u -> B u sending the last axis to the line direction is deterministic.
    """
    l = y.dim
    chosen: list[Vector] = []
    for j in range(l):
        if len(chosen) == l - 1:
            break
        e = tuple(Fraction(1 if i == j else 0) for i in range(l))
        cand = tuple(chosen) + (e, y.direction)
        if rank(cand) == len(chosen) + 2:
            chosen.append(e)
    if len(chosen) != l - 1:
        raise InternalError("could not extend the line direction to a basis")
    return from_columns(chosen + [y.direction], l)


@dataclass(frozen=True)
class FiberPoints:
    """Solutions of each transverse hyperplane on the fiber over ``base``.

    ``points`` maps hyperplane labels to the rational fiber coordinate;
    ``collisions`` lists label pairs with equal coordinates, which for some
    admissible base point happens exactly when the line is not good.
    """

    base: Vector
    points: dict[str, Fraction]
    collisions: tuple[tuple[str, str], ...]

    @property
    def has_collision(self) -> bool:
        return bool(self.collisions)


def fiber_points(arr: Arrangement, y: LineDirection, base) -> FiberPoints:
    """Roots along the fiber {base} x C after moving y to the last axis."""
    if y.dim != arr.ambient_dim:
        raise InputError("line direction dimension mismatch")
    base_v = vec(base)
    if len(base_v) != arr.ambient_dim - 1:
        raise InputError(
            f"base point must have {arr.ambient_dim - 1} coordinates, got {len(base_v)}"
        )
    basis = transverse_basis(y)
    points: dict[str, Fraction] = {}
    for h in arr.hyperplanes:
        new_coeffs = tuple(dot(h.coeffs, col) for col in zip(*basis))
        head, last = new_coeffs[:-1], new_coeffs[-1]
        affine = dot(head, base_v) + h.constant
        if last == 0:
            if affine == 0:
                raise InputError(
                    f"base point lies on the projected hyperplane {h.label}"
                )
            continue
        points[h.label] = -affine / last
    seen: dict[Fraction, str] = {}
    collisions = []
    for label in sorted(points):
        q = points[label]
        if q in seen:
            collisions.append((seen[q], label))
        else:
            seen[q] = label
    return FiberPoints(base_v, points, tuple(collisions))


def _halton(index: int, base: int) -> Fraction:
    f = Fraction(1)
    r = Fraction(0)
    i = index
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def _halton_point(index: int, dim: int) -> Vector:
    return tuple(3 * _halton(index, _PRIMES[j % len(_PRIMES)]) - 1 for j in range(dim))


def _projected_parallel_rows(arr: Arrangement, y: LineDirection) -> list[tuple[Vector, Fraction]]:
    """Linear forms cutting the projected parallel subarrangement in base coords."""
    basis = transverse_basis(y)
    rows = []
    for h in arr.hyperplanes:
        new_coeffs = tuple(dot(h.coeffs, col) for col in zip(*basis))
        if new_coeffs[-1] == 0:
            rows.append((new_coeffs[:-1], h.constant))
    return rows


def _off_projected(base_v: Vector, rows) -> bool:
    return all(dot(c, base_v) + a != 0 for c, a in rows)


def goodness_fiber_oracle(
    arr: Arrangement, y: LineDirection, sample_count: int = 20, seed: int = 0
) -> tuple[bool, dict]:
    """Fiber-counting oracle for goodness, independent of the poset test.

    Deterministic rational base points off the projected parallel
    subarrangement are probed; the line is declared not good as soon as some
    fiber carries fewer than n distinct roots.  The sample sequence is a
    low-discrepancy Halton fill augmented, ahead of it, with one point on the
    projection of each rank-two flat transverse to the line: root collisions
    happen exactly over those projections, so every non-good case exhibits a
    collision sample while agreement on all samples is reported as evidence.
    """
    if y.dim != arr.ambient_dim:
        raise InputError("line direction dimension mismatch")
    l = arr.ambient_dim
    proj_rows = _projected_parallel_rows(arr, y)
    _, rest = parallel_subarrangement(arr, y)
    report: dict = {"samples": [], "collision": None}

    candidates: list[Vector] = []
    if l >= 2 and len(rest) >= 2:
        sub = Arrangement.make(l, rest)
        basis = transverse_basis(y)
        for x in build_intersection_poset(sub).rank_two():
            p = x.point()
            dirs = x.directions()
            binv = _solve_coordinates(basis, p)
            proj_p = binv[:-1]
            proj_dirs = [_solve_coordinates(basis, d)[:-1] for d in dirs]
            if _projection_inside_parallel(proj_p, proj_dirs, proj_rows):
                continue
            pt = _point_on_subspace_off(proj_p, proj_dirs, proj_rows)
            candidates.append(pt)

    tested = 0
    idx = seed
    queue = list(candidates)
    while tested < max(sample_count, len(candidates)):
        if queue:
            base_v = queue.pop(0)
        else:
            idx += 1
            base_v = _halton_point(idx, l - 1)
            if not _off_projected(base_v, proj_rows):
                continue
        fp = fiber_points(arr, y, base_v)
        tested += 1
        report["samples"].append([str(c) for c in base_v])
        if fp.has_collision:
            report["collision"] = {
                "base": [str(c) for c in base_v],
                "pairs": [list(p) for p in fp.collisions],
            }
            return False, report
    return True, report


def _solve_coordinates(basis: Matrix, x: Vector) -> Vector:
    """Coordinates u with basis @ u = x (basis is square invertible)."""
    n = len(basis)
    aug = tuple(basis[i] + (x[i],) for i in range(n))
    red, pivots = rref(aug)
    if pivots != tuple(range(n)):
        raise InternalError("transverse basis is singular")
    return tuple(r[-1] for r in red)


def _projection_inside_parallel(p: Vector, dirs: list[Vector], proj_rows) -> bool:
    """True iff the projected flat lies inside some projected parallel hyperplane."""
    for c, a in proj_rows:
        if dot(c, p) + a == 0 and all(dot(c, d) == 0 for d in dirs):
            return True
    return False


def _point_on_subspace_off(p: Vector, dirs: list[Vector], proj_rows) -> Vector:
    """Deterministic point of p + span(dirs) avoiding the projected hyperplanes."""
    attempt = 0
    while True:
        shift = [Fraction(0)] * len(p)
        if attempt:
            for j, d in enumerate(dirs):
                t = Fraction(attempt) * _halton(attempt + j, _PRIMES[j % len(_PRIMES)]) + attempt
                shift = [s + t * dc for s, dc in zip(shift, d)]
        cand = tuple(pc + sc for pc, sc in zip(p, shift))
        if _off_projected(cand, proj_rows):
            return cand
        attempt += 1
        if attempt > 100:
            raise InternalError("failed to leave the projected parallel arrangement")
