"""Logarithmic Pfaffian systems with constant coefficients.

A system attaches one exact rational residue matrix to each hyperplane of an
arrangement.  This module owns the exact run-time checks: integrability via
commutators over rank-two flats, the no-nonzero-integer-eigenvalue condition,
the kernel/image genericity ("star") conditions used by the composition laws,
duality, and restriction to a fiber line for the numeric module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arrangement import (
    Arrangement,
    Flat,
    IntersectionPoset,
    LineDirection,
    build_intersection_poset,
    fiber_points,
    parallel_subarrangement,
)
from .errors import InputError, NonIntegrableInput, ParameterIntegral
from .fuchsian import FuchsianODE, standard_basepoint
from .linalg import (
    Matrix,
    commutator,
    frac,
    identity,
    integer_eigenvalues,
    is_zero_matrix,
    mat,
    mat_add,
    mat_scale,
    nullspace,
    pencil_minor_gcd,
    poly_degree,
    shape,
    transpose,
)


@dataclass(frozen=True)
class ConvolutionParameter:
    """Exact rational convolution parameter, required to be non-integer."""

    value: Fraction

    @staticmethod
    def make(value) -> "ConvolutionParameter":
        v = frac(value)
        if v.denominator == 1:
            raise ParameterIntegral(f"parameter {v} is an integer")
        return ConvolutionParameter(v)

    def negated(self) -> "ConvolutionParameter":
        return ConvolutionParameter(-self.value)

    def character_class(self) -> Fraction:
        """The value modulo 1 determining the character exp(2*pi*i*value)."""
        return self.value % 1


@dataclass(frozen=True)
class PfaffianSystem:
    arrangement: Arrangement
    dim_e: int
    residues: dict[str, Matrix]

    def __post_init__(self):
        labels = set(self.arrangement.labels())
        if set(self.residues) != labels:
            raise InputError("residues must cover exactly the arrangement's labels")
        for lbl, m in self.residues.items():
            if shape(m) != (self.dim_e, self.dim_e):
                raise InputError(f"residue {lbl} is not {self.dim_e} x {self.dim_e}")
        if self.dim_e < 0:
            raise InputError("dimension must be nonnegative")

    @staticmethod
    def make(arrangement: Arrangement, dim_e: int, residues, check: bool = True) -> "PfaffianSystem":
        res = {lbl: mat(m) for lbl, m in residues.items()}
        sys = PfaffianSystem(arrangement, dim_e, res)
        if check:
            rep = check_integrability(sys)
            if not rep.ok:
                raise NonIntegrableInput(
                    f"integrability fails at flat of rank two (hyperplane {rep.witness[1]})"
                )
        return sys

    def residue(self, label: str) -> Matrix:
        return self.residues[label]

    def transverse_residues(self, y: LineDirection) -> list[tuple[str, Matrix]]:
        """(label, residue) for hyperplanes not parallel to y, in label order
        of the arrangement."""
        _, rest = parallel_subarrangement(self.arrangement, y)
        return [(h.label, self.residues[h.label]) for h in rest]

    def transverse_sum(self, y: LineDirection) -> Matrix:
        out = tuple(
            (Fraction(0),) * self.dim_e for _ in range(self.dim_e)
        )
        for _, m in self.transverse_residues(y):
            out = mat_add(out, m)
        return out


@dataclass(frozen=True)
class IntegrabilityReport:
    ok: bool
    witness: tuple[Flat, str] | None = None


def check_integrability(
    sys: PfaffianSystem, poset: IntersectionPoset | None = None
) -> IntegrabilityReport:
    """Commutator test over rank-two flats.

    The wedge square of the coefficient form vanishes iff for every rank-two
    flat X and every hyperplane H containing X, the residue of H commutes
    with the sum of the residues of all hyperplanes containing X.  Parallel
    pairs drop out because their differentials are proportional.
    """
    if sys.dim_e <= 1:
        return IntegrabilityReport(True)
    if poset is None:
        poset = build_intersection_poset(sys.arrangement)
    for x in poset.rank_two():
        labels = sorted(x.containing)
        if len(labels) < 2:
            continue
        total = sys.residues[labels[0]]
        for lbl in labels[1:]:
            total = mat_add(total, sys.residues[lbl])
        for lbl in labels:
            if not is_zero_matrix(commutator(sys.residues[lbl], total)):
                return IntegrabilityReport(False, (x, lbl))
    return IntegrabilityReport(True)


@dataclass(frozen=True)
class GenericityReport:
    ok: bool
    offenders: tuple[tuple[str, int], ...]


def check_assumption_generic(
    sys: PfaffianSystem, y: LineDirection, lam: ConvolutionParameter
) -> GenericityReport:
    """No transverse residue, nor their sum plus the parameter, may have a
    nonzero integer eigenvalue."""
    offenders: list[tuple[str, int]] = []
    for lbl, m in sys.transverse_residues(y):
        for k in integer_eigenvalues(m):
            if k != 0:
                offenders.append((lbl, k))
    shifted = mat_add(sys.transverse_sum(y), mat_scale(identity(sys.dim_e), lam.value))
    for k in integer_eigenvalues(shifted):
        if k != 0:
            offenders.append(("<sum>", k))
    return GenericityReport(not offenders, tuple(offenders))


@dataclass(frozen=True)
class StarReport:
    ok: bool
    failures: tuple[tuple[str, str], ...]  # (condition, hyperplane label)


def _kernel_pencil_ok(residues: list[tuple[str, Matrix]], idx: int, dim: int) -> bool:
    """True iff no complex t admits a nonzero v with A_idx v = -t v inside
    the joint kernel of the other residues."""
    others = [m for j, (_, m) in enumerate(residues) if j != idx]
    if others:
        stacked = tuple(r for m in others for r in m)
        w_basis = nullspace(stacked, dim)
    else:
        w_basis = nullspace((), dim)
    if not w_basis:
        return True
    b = transpose(tuple(w_basis))
    a_h = residues[idx][1]
    c = tuple(
        tuple(sum((a_h[i][k] * b[k][j] for k in range(dim)), Fraction(0)) for j in range(len(w_basis)))
        for i in range(dim)
    )
    g = pencil_minor_gcd(c, b)
    return poly_degree(g) == 0


def check_star_conditions(sys: PfaffianSystem, y: LineDirection) -> StarReport:
    """Kernel and image genericity for every transverse hyperplane.

    The kernel condition is tested by a pencil of maximal minors; the image
    condition is the same test applied to the transposed system.
    """
    res = sys.transverse_residues(y)
    res_t = [(lbl, transpose(m)) for lbl, m in res]
    failures: list[tuple[str, str]] = []
    for i, (lbl, _) in enumerate(res):
        if not _kernel_pencil_ok(res, i, sys.dim_e):
            failures.append(("kernel", lbl))
        if not _kernel_pencil_ok(res_t, i, sys.dim_e):
            failures.append(("image", lbl))
    return StarReport(not failures, tuple(failures))


def dual_system(sys: PfaffianSystem) -> PfaffianSystem:
    """Residues negated and transposed; integrability is preserved."""
    res = {lbl: mat_scale(transpose(m), Fraction(-1)) for lbl, m in sys.residues.items()}
    return PfaffianSystem(sys.arrangement, sys.dim_e, res)


def fiber_restriction(sys: PfaffianSystem, y: LineDirection, base) -> FuchsianODE:
    """Restrict to the fiber over ``base``: one simple pole per transverse
    hyperplane, same residues, converted to floating complex here and only
    here."""
    fp = fiber_points(sys.arrangement, y, base)
    if fp.has_collision:
        raise InputError(
            f"fiber points collide over this base: {fp.collisions}; "
            "the line is not good or the base is special"
        )
    items = sorted(fp.points.items(), key=lambda kv: (kv[1], kv[0]))
    poles = tuple(complex(q) for _, q in items)
    labels = tuple(lbl for lbl, _ in items)
    residues = tuple(
        np.array([[complex(x) for x in row] for row in sys.residues[lbl]], dtype=complex).reshape(
            sys.dim_e, sys.dim_e
        )
        for lbl in labels
    )
    return FuchsianODE(poles, residues, labels, standard_basepoint(poles), sys.dim_e)
