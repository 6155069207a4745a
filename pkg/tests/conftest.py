"""Shared corpus builders for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

from arrmc import (
    Arrangement,
    Hyperplane,
    LineDirection,
    PfaffianSystem,
)
from arrmc.linalg import Matrix, mat, rref

Y_AXIS = LineDirection.make([0, 1])


def four_lines() -> Arrangement:
    """{x=0, y=0, x-y=0, x=1} in C^2; the y-axis is a good line."""
    return Arrangement.make(
        2,
        [
            Hyperplane.make([1, 0], 0, "x"),
            Hyperplane.make([0, 1], 0, "y"),
            Hyperplane.make([1, -1], 0, "d"),
            Hyperplane.make([1, 0], -1, "x1"),
        ],
    )


def braid3() -> Arrangement:
    return Arrangement.make(
        2,
        [
            Hyperplane.make([1, 0], 0, "x"),
            Hyperplane.make([0, 1], 0, "y"),
            Hyperplane.make([1, -1], 0, "d"),
        ],
    )


def triple_point_system(a=F(1, 2), b=F(1, 3), e=F(2, 7)) -> PfaffianSystem:
    """Three transverse lines through the origin plus two vertical walls.

    All three transverse pairs shift onto the same wall x=0, so the shifted
    contributions accumulate; n = 3.
    """
    arr = Arrangement.make(
        2,
        [
            Hyperplane.make([1, 0], 0, "x"),
            Hyperplane.make([0, 1], 0, "y"),
            Hyperplane.make([1, -1], 0, "d"),
            Hyperplane.make([1, 1], 0, "s"),
            Hyperplane.make([1, 0], -1, "x1"),
        ],
    )
    return PfaffianSystem.make(
        arr, 1, {"x": [[0]], "y": [[a]], "d": [[b]], "s": [[e]], "x1": [[0]]}
    )


def nongood_pair() -> Arrangement:
    """{y=0, x-y=0}: the y-axis is not good (the origin shifts to x=0)."""
    return Arrangement.make(
        2,
        [
            Hyperplane.make([0, 1], 0, "y"),
            Hyperplane.make([1, -1], 0, "d"),
        ],
    )


def four_lines_system(a, b, c, d) -> PfaffianSystem:
    return PfaffianSystem.make(
        four_lines(),
        1,
        {"x": [[c]], "y": [[a]], "d": [[b]], "x1": [[d]]},
    )


def kz_system(scale=F(1, 2), outer=F(1, 3)) -> PfaffianSystem:
    """Noncommuting 2x2 integrable system on the four-line arrangement.

    The three residues through the origin sum to a central matrix, and the
    parallel line x=1 carries a scalar, so all rank-two commutator
    conditions hold while the transverse residues do not commute.
    """
    a_y = mat([[0, 1], [0, 0]])
    a_d = mat([[0, 0], [1, 0]])
    a_x = mat([[scale, -1], [-1, scale]])
    a_x1 = mat([[outer, 0], [0, outer]])
    return PfaffianSystem.make(
        four_lines(), 2, {"x": a_x, "y": a_y, "d": a_d, "x1": a_x1}
    )


def line_points(qs) -> Arrangement:
    """Points q on the affine line, as an arrangement in C^1."""
    return Arrangement.make(
        1, [Hyperplane.make([1], -F(q), f"p{i}") for i, q in enumerate(qs)]
    )


def line_system(qs, mats) -> PfaffianSystem:
    arr = line_points(qs)
    d = len(mats[0])
    return PfaffianSystem.make(
        arr, d, {f"p{i}": m for i, m in enumerate(mats)}
    )


X_AXIS_1D = LineDirection.make([1])
Z_AXIS_3D = LineDirection.make([0, 0, 1])


def slab_system_3d() -> PfaffianSystem:
    """Two parallel transverse planes and one parallel wall in C^3.

    The transverse planes never meet, so the shifted family is empty and the
    transverse residues may be chosen freely (the wall carries a scalar).
    """
    arr = Arrangement.make(
        3,
        [
            Hyperplane.make([0, 0, 1], 0, "z0"),
            Hyperplane.make([0, 0, 1], -1, "z1"),
            Hyperplane.make([1, 0, 0], 0, "x"),
        ],
    )
    return PfaffianSystem.make(
        arr,
        2,
        {
            "x": [[F(1, 3), 0], [0, F(1, 3)]],
            "z0": [[F(1, 2), F(1, 4)], [0, F(1, 5)]],
            "z1": [[F(1, 7), 0], [F(1, 2), F(2, 5)]],
        },
    )


def composition_corpus() -> list[tuple[PfaffianSystem, LineDirection]]:
    """Systems passing the star conditions, for the composition laws."""
    return [
        (four_lines_system(F(1, 2), F(1, 3), 0, 0), Y_AXIS),
        (four_lines_system(F(1, 2), F(1, 3), F(1, 4), F(1, 5)), Y_AXIS),
        (
            PfaffianSystem.make(
                braid3(),
                1,
                {"x": [[F(1, 4)]], "y": [[F(1, 2)]], "d": [[F(2, 5)]]},
            ),
            Y_AXIS,
        ),
        (kz_system(), Y_AXIS),
        (line_system([0, 1, 3], [[[F(1, 2)]], [[F(1, 3)]], [[F(2, 7)]]]), X_AXIS_1D),
        (
            line_system(
                [0, 2],
                [mat([[F(1, 2), F(1, 3)], [0, F(1, 5)]]), mat([[F(1, 7), 0], [F(1, 2), F(2, 5)]])],
            ),
            X_AXIS_1D,
        ),
        (slab_system_3d(), Z_AXIS_3D),
        (triple_point_system(), Y_AXIS),
    ]


def random_arrangement(rng: random.Random, dim: int, count: int) -> Arrangement:
    """Deterministic random arrangement with small rational coefficients."""
    hs = []
    seen = set()
    attempts = 0
    while len(hs) < count and attempts < 200:
        attempts += 1
        coeffs = [F(rng.randint(-2, 2)) for _ in range(dim)]
        if all(c == 0 for c in coeffs):
            continue
        const = F(rng.randint(-2, 2), rng.randint(1, 2))
        h = Hyperplane.make(coeffs, const, f"h{len(hs)}")
        key = (h.coeffs, h.constant)
        if key in seen:
            continue
        seen.add(key)
        hs.append(h)
    return Arrangement.make(dim, hs)


def brute_force_poset(arr: Arrangement) -> set[Matrix]:
    """All canonical flats by explicit subset enumeration (the oracle)."""
    flats: set[Matrix] = {()}
    for r in range(1, len(arr.hyperplanes) + 1):
        for subset in itertools.combinations(arr.hyperplanes, r):
            rows = tuple(h.equation_row() for h in subset)
            red, pivots = rref(rows)
            if arr.ambient_dim in pivots:
                continue
            flats.add(red)
    return flats
