"""Exact linear algebra over the rationals.

Matrices are immutable tuples of row tuples of ``fractions.Fraction``; the
one-variable polynomials used by the pencil tests are tuples of coefficients
in increasing degree order (the zero polynomial is the empty tuple).
Everything here is exact; floating point never enters.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import isqrt

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]
Poly = tuple[Fraction, ...]


def frac(x) -> Fraction:
    """Coerce ints, strings like ``"2/3"`` and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def vec(xs) -> Vector:
    return tuple(frac(x) for x in xs)


def mat(rows) -> Matrix:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def zeros(r: int, c: int) -> Matrix:
    return tuple((Fraction(0),) * c for _ in range(r))


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, s: Fraction) -> Matrix:
    return tuple(tuple(s * x for x in r) for r in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(
        tuple(sum((x * y for x, y in zip(ra, cb)), Fraction(0)) for cb in bt)
        for ra in a
    )


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in a)


def dot(u: Vector, v: Vector) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; block (i, j) equals ``a[i][j] * b``."""
    ra, ca = shape(a)
    rb, cb = shape(b)
    return tuple(
        tuple(a[i][j] * b[k][l] for j in range(ca) for l in range(cb))
        for i in range(ra)
        for k in range(rb)
    )


def hstack(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return b
    if not b:
        return a
    return tuple(ra + rb for ra, rb in zip(a, b))


def vstack(a: Matrix, b: Matrix) -> Matrix:
    return a + b


def columns(m: Matrix) -> list[Vector]:
    return list(transpose(m))


def from_columns(cols, nrows: int | None = None) -> Matrix:
    cols = list(cols)
    if not cols:
        return zeros(nrows or 0, 0)
    return transpose(tuple(cols))


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def is_zero_matrix(m: Matrix) -> bool:
    return all(x == 0 for r in m for x in r)


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped.

    Pivots are chosen left to right, so the result is the canonical form
    used for flat equality throughout the package.
    """
    rows = [list(r) for r in m]
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    pivots: list[int] = []
    pr = 0
    for pc in range(nc):
        pivot_row = None
        for i in range(pr, nr):
            if rows[i][pc] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
        inv = 1 / rows[pr][pc]
        rows[pr] = [x * inv for x in rows[pr]]
        for i in range(nr):
            if i != pr and rows[i][pc] != 0:
                f = rows[i][pc]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[pr])]
        pivots.append(pc)
        pr += 1
        if pr == nr:
            break
    return tuple(tuple(r) for r in rows[:pr]), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[0])


def nullspace(m: Matrix, ncols: int | None = None) -> list[Vector]:
    """Canonical kernel basis: one vector per free column, ordered by it."""
    if not m:
        n = ncols if ncols is not None else 0
        return [tuple(Fraction(1 if i == j else 0) for i in range(n)) for j in range(n)]
    n = len(m[0])
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for j in range(n):
        if j in pivset:
            continue
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][j]
        basis.append(tuple(v))
    return basis


def det(m: Matrix) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    rows = [list(r) for r in m]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            sign = -sign
        out *= rows[c][c]
        inv = 1 / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return sign * out


def mat_inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(r) + [Fraction(1 if i == j else 0) for j in range(n)] for i, r in enumerate(m)]
    red, pivots = rref(tuple(tuple(r) for r in aug))
    if pivots != tuple(range(n)):
        raise ValueError("matrix is singular")
    return tuple(r[n:] for r in red)


def charpoly(m: Matrix) -> Poly:
    """Monic characteristic polynomial, coefficients low to high degree.

    Faddeev-LeVerrier recursion; exact over the rationals.
    """
    n = len(m)
    if n == 0:
        return (Fraction(1),)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = m
    for k in range(1, n + 1):
        ck = -sum((mk[i][i] for i in range(n)), Fraction(0)) / k
        coeffs[n - k] = ck
        if k < n:
            mk = mat_mul(m, mat_add(mk, mat_scale(identity(n), ck)))
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# polynomials in one variable, coefficients low -> high


def poly_trim(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_degree(p: Poly) -> int:
    """Degree; the zero polynomial gets -1."""
    return len(poly_trim(p)) - 1


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(p):
        out = out * x + c
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    p, q = poly_trim(p), poly_trim(q)
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def poly_monic(p: Poly) -> Poly:
    p = poly_trim(p)
    if not p:
        return ()
    lead = p[-1]
    return tuple(c / lead for c in p)


def poly_mod(a: Poly, b: Poly) -> Poly:
    a = list(poly_trim(a))
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial modulo zero")
    db = len(b) - 1
    lead = b[-1]
    while len(a) - 1 >= db and a:
        f = a[-1] / lead
        sh = len(a) - 1 - db
        for i, c in enumerate(b):
            a[sh + i] -= f * c
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_mod(a, b)
    return poly_monic(a)


def lagrange_interpolate(points: list[tuple[Fraction, Fraction]]) -> Poly:
    out: Poly = ()
    for i, (xi, yi) in enumerate(points):
        term: Poly = (yi,)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            term = poly_mul(term, (-xj / (xi - xj), 1 / (xi - xj)))
        out = poly_trim(
            tuple(
                (out[k] if k < len(out) else Fraction(0))
                + (term[k] if k < len(term) else Fraction(0))
                for k in range(max(len(out), len(term)))
            )
        )
    return out


def pencil_minor_gcd(c: Matrix, d: Matrix) -> Poly:
    """Gcd of all maximal minors of the pencil ``c + t*d``.

    ``c`` and ``d`` share a shape (rows x w, rows >= w).  Each maximal minor
    is a polynomial in t of degree <= w, recovered by evaluating the exact
    determinant at w+1 sample points and interpolating.  A nonzero constant
    gcd certifies that the pencil has full column rank for every complex t.
    """
    nrows, w = shape(c)
    if w == 0:
        return (Fraction(1),)
    if nrows < w:
        return ()
    samples = [Fraction(k) for k in range(w + 1)]
    g: Poly = ()
    for rows_idx in combinations(range(nrows), w):
        pts = []
        for t in samples:
            sub = tuple(
                tuple(c[i][j] + t * d[i][j] for j in range(w)) for i in rows_idx
            )
            pts.append((t, det(sub)))
        minor = lagrange_interpolate(pts)
        g = poly_gcd(g, minor)
        if poly_degree(g) == 0:
            return g
    return g


# ---------------------------------------------------------------------------
# integer eigenvalue detection


def _divisors_up_to(n: int, bound: int) -> list[int]:
    n = abs(n)
    out = set()
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            if d <= bound:
                out.add(d)
            if n // d <= bound:
                out.add(n // d)
    return sorted(out)


def integer_eigenvalues(m: Matrix) -> list[int]:
    """All integer eigenvalues of ``m``, zero included, exactly.

    Candidates are capped by the Cauchy bound 1 + max |coefficient| of the
    monic characteristic polynomial and pre-filtered by the rational root
    theorem (integer roots divide the cleared constant term); each survivor
    is confirmed by evaluating the characteristic polynomial, i.e. by the
    exact singularity of m - k*Id.
    """
    p = charpoly(m)
    if len(p) == 1:
        return []
    found = []
    work = poly_trim(p)
    zero_mult = 0
    while work and work[0] == 0:
        zero_mult += 1
        work = work[1:]
    if zero_mult:
        found.append(0)
    if poly_degree(work) < 1:
        return found
    bound = 1 + max(abs(c) for c in work[:-1])
    kmax = int(bound)
    denom_lcm = 1
    for c in work:
        denom_lcm = denom_lcm * c.denominator // _gcd_int(denom_lcm, c.denominator)
    const = int(work[0] * denom_lcm)
    for k in _divisors_up_to(const, kmax):
        for s in (k, -k):
            if poly_eval(p, Fraction(s)) == 0:
                found.append(s)
    return sorted(found)


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# subspace helpers (columns spanning subspaces)


def column_space_rank(cols: list[Vector]) -> int:
    if not cols:
        return 0
    return rank(tuple(cols))


def in_span(v: Vector, cols: list[Vector]) -> bool:
    if all(x == 0 for x in v):
        return True
    if not cols:
        return False
    base = tuple(cols)
    return rank(base) == rank(base + (v,))


def extend_to_basis(cols: list[Vector], dim: int) -> list[int]:
    """Indices of standard basis vectors completing ``cols`` to a basis.

    Greedy in index order; deterministic.
    """
    chosen: list[int] = []
    current = list(cols)
    r = column_space_rank(current)
    for j in range(dim):
        if r == dim:
            break
        e = tuple(Fraction(1 if i == j else 0) for i in range(dim))
        cand = current + [e]
        rr = column_space_rank(cand)
        if rr > r:
            chosen.append(j)
            current = cand
            r = rr
    if r != dim:
        raise ValueError("could not complete to a basis")
    return chosen


# ---------------------------------------------------------------------------
# intertwiner search


def intertwiner_space(pairs: list[tuple[Matrix, Matrix]], d: int) -> list[Matrix]:
    """Basis of {S : S A = B S for every pair (A, B)} of d x d matrices."""
    if d == 0:
        return []
    rows = []
    for a, b in pairs:
        for i in range(d):
            for j in range(d):
                row = [Fraction(0)] * (d * d)
                for k in range(d):
                    row[i * d + k] += a[k][j]
                    row[k * d + j] -= b[i][k]
                rows.append(tuple(row))
    basis = nullspace(tuple(rows), d * d) if rows else nullspace((), d * d)
    return [tuple(tuple(v[i * d + j] for j in range(d)) for i in range(d)) for v in basis]


_SEARCH_SEED = 0x5EBA11
_SEARCH_SAMPLES = 128
_SEARCH_RANGE = 1 << 70


def find_invertible_combination(basis: list[Matrix], d: int) -> Matrix | None:
    """An invertible element of the span, or None when there is none.

    Single basis elements are tried first.  For spans of dimension at most
    four the determinant polynomial has degree at most d in each coefficient,
    so scanning the integer grid {0..d}^m decides existence exactly.  Larger
    spans fall back to fixed-seed random evaluation with failure probability
    below 2**-64 per declared miss.
    """
    import random
    from itertools import product as _product

    for s in basis:
        if det(s) != 0:
            return s
    m = len(basis)
    if m <= 1:
        return None
    if m <= 4:
        for coeffs in _product(range(d + 1), repeat=m):
            if sum(coeffs) == 0:
                continue
            cand = mat_scale(basis[0], Fraction(coeffs[0]))
            for c, s in zip(coeffs[1:], basis[1:]):
                cand = mat_add(cand, mat_scale(s, Fraction(c)))
            if det(cand) != 0:
                return cand
        return None
    rng = random.Random(_SEARCH_SEED)
    for _ in range(max(_SEARCH_SAMPLES, d + 1)):
        coeffs = [Fraction(rng.randrange(-_SEARCH_RANGE, _SEARCH_RANGE)) for _ in range(m)]
        cand = mat_scale(basis[0], coeffs[0])
        for c, s in zip(coeffs[1:], basis[1:]):
            cand = mat_add(cand, mat_scale(s, c))
        if det(cand) != 0:
            return cand
    return None
