"""Command-line front end.

Exit codes: 0 success / property true, 1 property false (witness in the
report), 2 input error, 3 numeric failure.  Reports are JSON with sorted
keys, byte-identical across runs for fixed inputs and tolerances.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .arrangement import (
    Flat,
    LineDirection,
    build_intersection_poset,
    cone,
    decone,
    goodness_fiber_oracle,
    is_good_line,
)
from .convolution import (
    convolve,
    is_isomorphic,
    middle_convolve,
    verify_composition_law,
)
from .errors import (
    ArrmcError,
    InputError,
    NumericError,
    PropertyFailure,
)
from .katz import CharacterValue, check_property_p, multiplicative_middle_convolution
from .linalg import frac
from .monodromy import monodromy_tuple_of_system, verify_mc_compatibility
from .pfaffian import (
    ConvolutionParameter,
    check_assumption_generic,
    check_integrability,
    check_star_conditions,
)
from . import serialization as ser


@dataclass
class JobSpec:
    """One CLI invocation: command, input paths, parameter overrides."""

    command: str
    inputs: list[str]
    params: dict = field(default_factory=dict)
    out: str | None = None


def _flat_json(f: Flat) -> dict:
    return {
        "rank": f.rank,
        "equations": [[ser.rational_str(x) for x in row] for row in f.rows],
        "containing": sorted(f.containing),
    }


def _matrix_json(m) -> list:
    return [[ser.rational_str(x) for x in row] for row in m]


def _parse_line(s: str) -> LineDirection:
    return LineDirection.make([frac(part) for part in s.split(",")])


def _parse_base(s: str):
    s = s.strip()
    if not s:
        return []
    return [frac(part) for part in s.split(",")]


def _load_system(path: str, params: dict):
    return ser.system_from_json(ser.load_path(path), check=not params.get("unchecked"))


def _cmd_poset(job: JobSpec):
    arr = ser.arrangement_from_json(ser.load_path(job.inputs[0]))
    poset = build_intersection_poset(arr)
    report = {
        "command": "poset",
        "dim": arr.ambient_dim,
        "flats_by_rank": [
            [_flat_json(f) for f in stratum] for stratum in poset.by_rank
        ],
        "counts": [len(s) for s in poset.by_rank],
        "cover_count": len(poset.covers),
    }
    return 0, report


def _cmd_goodline(job: JobSpec):
    arr = ser.arrangement_from_json(ser.load_path(job.inputs[0]))
    y = job.params["line"]
    good, witness = is_good_line(arr, y)
    report = {
        "command": "goodline",
        "direction": [ser.rational_str(c) for c in y.direction],
        "good": good,
    }
    if witness is not None:
        report["witness"] = _flat_json(witness)
    if "samples" in job.params:
        oracle, odata = goodness_fiber_oracle(
            arr, y, job.params["samples"], seed=job.params.get("seed", 0)
        )
        report["fiber_oracle"] = {"good": oracle, **odata}
        report["agreement"] = oracle == good
    return (0 if good else 1), report


def _cmd_cone(job: JobSpec):
    arr = ser.arrangement_from_json(ser.load_path(job.inputs[0]))
    out = ser.arrangement_to_json(cone(arr))
    return 0, {"command": "cone", "arrangement": out}


def _cmd_decone(job: JobSpec):
    arr = ser.arrangement_from_json(ser.load_path(job.inputs[0]))
    out = ser.arrangement_to_json(decone(arr))
    return 0, {"command": "decone", "arrangement": out}


def _cmd_check(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    lam = job.params["lambda"]
    integ = check_integrability(sys_)
    gen = check_assumption_generic(sys_, y, lam)
    star = check_star_conditions(sys_, y)
    ok = integ.ok and gen.ok and star.ok
    report = {
        "command": "check",
        "integrable": integ.ok,
        "genericity": {
            "ok": gen.ok,
            "offenders": [[lbl, k] for lbl, k in gen.offenders],
        },
        "star": {"ok": star.ok, "failures": [list(f) for f in star.failures]},
        "ok": ok,
    }
    if not integ.ok:
        report["integrability_witness"] = {
            "flat": _flat_json(integ.witness[0]),
            "hyperplane": integ.witness[1],
        }
    return (0 if ok else 1), report


def _cmd_convolve(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    lam = job.params["lambda"]
    cr = convolve(sys_, y, lam, require_good=not job.params.get("unchecked"))
    report = {
        "command": "convolve",
        "block_order": list(cr.block_order),
        "dim": cr.system.dim_e,
        "kernel_dims": {
            "blockwise": len(cr.block_kernel_basis),
            "diagonal": len(cr.diagonal_kernel_basis),
        },
        "blockwise_kernel_basis": [[ser.rational_str(x) for x in v] for v in cr.block_kernel_basis],
        "diagonal_kernel_basis": [[ser.rational_str(x) for x in v] for v in cr.diagonal_kernel_basis],
        "system": ser.system_to_json(cr.system),
    }
    return 0, report


def _cmd_middle_convolve(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    lam = job.params["lambda"]
    out = middle_convolve(sys_, y, lam, require_good=not job.params.get("unchecked"))
    report = {
        "command": "middle-convolve",
        "input_dim": sys_.dim_e,
        "dim": out.dim_e,
        "system": ser.system_to_json(out),
    }
    return 0, report


def _cmd_compose_verify(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    rep = verify_composition_law(sys_, y, job.params["lambda"], job.params["mu"])
    report = {
        "command": "compose-verify",
        "lambda": ser.rational_str(rep.parameters[0]),
        "mu": ser.rational_str(rep.parameters[1]),
        "dims": rep.dims,
        "star_ok": rep.star_ok,
        "intermediate_star_ok": rep.intermediate_star_ok,
        "additive_law_holds": rep.additive_law_holds,
        "inverse_law_holds": rep.inverse_law_holds,
        "ok": rep.ok,
    }
    if rep.additive_intertwiner is not None:
        report["additive_intertwiner"] = _matrix_json(rep.additive_intertwiner)
    if rep.inverse_intertwiner is not None:
        report["inverse_intertwiner"] = _matrix_json(rep.inverse_intertwiner)
    return (0 if rep.ok else 1), report


def _cmd_katz_mc(job: JobSpec):
    t = ser.tuple_from_json(ser.load_path(job.inputs[0]))
    if "scalar" in job.params:
        c = CharacterValue.from_scalar(job.params["scalar"])
    else:
        c = CharacterValue.from_exponent(job.params["lambda"].value)
    prop = check_property_p(t, job.params.get("rank_tol", 1e-9))
    out = multiplicative_middle_convolution(t, c, job.params.get("rank_tol", 1e-9))
    report = {
        "command": "katz-mc",
        "character": ser.character_to_json(c),
        "input_rank": t.rank,
        "punctures": t.npoints,
        "property_p": {"ok": prop.ok, "failures": list(prop.failures)},
        "output_rank": out.rank,
        "tuple": ser.tuple_to_json(out),
    }
    return 0, report


def _cmd_monodromy(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    base = job.params["base"]
    tol = job.params.get("tol", 1e-10)
    ext = monodromy_tuple_of_system(sys_, y, base, tol)
    t = ext.monodromy
    report = {
        "command": "monodromy",
        "base": [ser.rational_str(b) for b in base],
        "basepoint": [ext.basepoint.real, ext.basepoint.imag],
        "punctures": t.npoints,
        "rank": t.rank,
        "labels": list(t.labels or ()),
        "product_residual": ext.product_residual,
        "condition_numbers": list(t.condition_numbers()),
        "residue_at_infinity": [
            [[float(x.real), float(x.imag)] for x in row] for row in ext.infinity_residue
        ],
        "tuple": ser.tuple_to_json(t),
        "ok": True,
    }
    return 0, report


def _cmd_rh_verify(job: JobSpec):
    sys_ = _load_system(job.inputs[0], job.params)
    y = job.params["line"]
    lam = job.params["lambda"]
    base = job.params["base"]
    tol = job.params.get("tol", 1e-10)
    iso_tol = job.params.get("iso_tol", 1e-6)

    integ = check_integrability(sys_)
    gen = check_assumption_generic(sys_, y, lam)
    star = check_star_conditions(sys_, y)
    stages: dict = {
        "integrable": integ.ok,
        "genericity_ok": gen.ok,
        "star_ok": star.ok,
    }
    report = {"command": "rh-verify", "stages": stages, "ok": False}
    if not (integ.ok and gen.ok and star.ok):
        report["offenders"] = {
            "genericity": [[lbl, k] for lbl, k in gen.offenders],
            "star": [list(f) for f in star.failures],
        }
        return 1, report

    compat = verify_mc_compatibility(
        sys_, y, lam, base, tol, iso_tol, job.params.get("rank_tol", 1e-9)
    )
    stages["compatibility_ok"] = compat.ok
    report["compatibility"] = {
        "rank_multiplicative": compat.rank_multiplicative,
        "rank_restricted": compat.rank_restricted,
        "charpoly_deviation": compat.charpoly_deviation,
        "isomorphic": compat.isomorphic,
        "intertwiner_residual": compat.intertwiner_residual,
        "generator_charpolys": compat.generator_charpolys,
    }
    if not compat.ok:
        return 1, report

    forward = middle_convolve(sys_, y, lam)
    back = middle_convolve(forward, y, lam.negated())
    iso, intertwiner = is_isomorphic(back, sys_)
    stages["round_trip_ok"] = iso
    report["round_trip"] = {
        "forward_dim": forward.dim_e,
        "back_dim": back.dim_e,
        "isomorphic": iso,
    }
    if intertwiner is not None:
        report["round_trip"]["intertwiner"] = _matrix_json(intertwiner)
    report["ok"] = iso
    return (0 if iso else 1), report


_COMMANDS = {
    "poset": _cmd_poset,
    "goodline": _cmd_goodline,
    "cone": _cmd_cone,
    "decone": _cmd_decone,
    "check": _cmd_check,
    "convolve": _cmd_convolve,
    "middle-convolve": _cmd_middle_convolve,
    "compose-verify": _cmd_compose_verify,
    "katz-mc": _cmd_katz_mc,
    "monodromy": _cmd_monodromy,
    "rh-verify": _cmd_rh_verify,
}


def run(job: JobSpec) -> tuple[int, dict]:
    """Dispatch a job; returns (exit code, report)."""
    try:
        return _COMMANDS[job.command](job)
    except PropertyFailure as exc:
        return 1, {"command": job.command, "ok": False, "error": str(exc)}
    except InputError as exc:
        return 2, {"command": job.command, "error": str(exc)}
    except NumericError as exc:
        return 3, {"command": job.command, "error": str(exc)}
    except ArrmcError as exc:
        return 2, {"command": job.command, "error": str(exc)}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="arrmc",
        description="Hyperplane arrangements, middle convolution and numeric monodromy.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *, needs_line=False, needs_lambda=False, needs_mu=False, needs_base=False):
        sp = sub.add_parser(name)
        sp.add_argument("input", help="input JSON file")
        if needs_line:
            sp.add_argument("--line", required=True, help='line direction, e.g. "0,1"')
        if needs_lambda:
            sp.add_argument("--lambda", dest="lam", required=True, help="parameter p/q")
        if needs_mu:
            sp.add_argument("--mu", required=True, help="second parameter p/q")
        if needs_base:
            sp.add_argument("--base", required=True, help='base point, e.g. "2" or "2,3"')
        sp.add_argument("--out", help="write the report to this file")
        sp.add_argument("--unchecked", action="store_true", help="skip integrability at load")
        sp.add_argument("--tol", type=float, default=1e-10, help="integration tolerance")
        sp.add_argument("--iso-tol", dest="iso_tol", type=float, default=1e-6)
        sp.add_argument("--rank-tol", dest="rank_tol", type=float, default=1e-9,
                        help="relative singular value threshold for numeric ranks")
        sp.add_argument("--samples", type=int, help="fiber oracle sample count")
        sp.add_argument("--seed", type=int, default=0, help="sample sequence offset")
        return sp

    add("poset")
    add("goodline", needs_line=True)
    add("cone")
    add("decone")
    add("check", needs_line=True, needs_lambda=True)
    add("convolve", needs_line=True, needs_lambda=True)
    add("middle-convolve", needs_line=True, needs_lambda=True)
    add("compose-verify", needs_line=True, needs_lambda=True, needs_mu=True)
    katz = sub.add_parser("katz-mc")
    katz.add_argument("input")
    katz.add_argument("--lambda", dest="lam", help="character exponent p/q")
    katz.add_argument("--scalar", help="exact rational character value")
    katz.add_argument("--rank-tol", dest="rank_tol", type=float, default=1e-9)
    katz.add_argument("--out")
    add("monodromy", needs_line=True, needs_base=True)
    add("rh-verify", needs_line=True, needs_lambda=True, needs_base=True)
    return p


def _job_from_args(args) -> JobSpec:
    params: dict = {}
    if getattr(args, "line", None):
        params["line"] = _parse_line(args.line)
    if getattr(args, "lam", None):
        params["lambda"] = ConvolutionParameter.make(frac(args.lam))
    if getattr(args, "mu", None):
        params["mu"] = ConvolutionParameter.make(frac(args.mu))
    if getattr(args, "base", None) is not None:
        params["base"] = _parse_base(args.base)
    if getattr(args, "scalar", None):
        params["scalar"] = frac(args.scalar)
    if getattr(args, "unchecked", False):
        params["unchecked"] = True
    if getattr(args, "tol", None) is not None:
        params["tol"] = args.tol
    if getattr(args, "iso_tol", None) is not None:
        params["iso_tol"] = args.iso_tol
    if getattr(args, "rank_tol", None) is not None:
        params["rank_tol"] = args.rank_tol
    if getattr(args, "samples", None) is not None:
        params["samples"] = args.samples
    if getattr(args, "seed", None):
        params["seed"] = args.seed
    return JobSpec(args.command, [args.input], params, getattr(args, "out", None))


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "katz-mc" and not (getattr(args, "lam", None) or getattr(args, "scalar", None)):
        parser.error("katz-mc needs --lambda or --scalar")
    try:
        job = _job_from_args(args)
    except ArrmcError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    code, report = run(job)
    text = ser.dumps(report)
    if job.out:
        with open(job.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
