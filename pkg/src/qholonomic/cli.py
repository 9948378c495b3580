"""Command line front end.

Every subcommand writes one JSON report (stdout, or ``--output``) with the
effective configuration, the exact results, a short human-readable summary
and a status.  Exit codes: 0 all checks pass, 1 a check failed, 2 input could
not be parsed, 3 a desk-scale resource cap was hit.

Operands may be literal text, a path to a JSON/text file, or a bundled name:
``trefoil``, ``torus:K`` (braids), ``gelca:K`` (printed torus-knot operator),
``gelca-skein:K`` (the corresponding skein element).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import OutOfRange, ParseError, QHolonomicError, ResourceLimit
from .hierarchy import (
    build_hierarchy,
    degree_invariants,
    hierarchy_residuals,
    normalize_annihilator,
    solve_hierarchy,
)
from .skein import (
    Convention,
    SkeinElement,
    gelca_element,
    phi,
    phi_inverse,
    printed_recursion_element,
    skein_mul,
)
from .weyl import E, WeylElement, weyl_mul

DEFAULTS = {
    "order": 4,
    "loops": 3,
    "jet_order": 4,
    "range": "-6..6",
    "mirror": False,
    "shift": 0,
    "gelca_t": False,
    "expansion_point": "1",
    "cache_dir": None,
    "output": None,
}

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ParseError):
    pass


# ---------------------------------------------------------------------------
# operand loading


def _read(text: str) -> str:
    p = Path(text)
    if len(text) < 4096 and p.suffix in (".json", ".txt") and p.exists():
        return p.read_text()
    return text


def _bundled(name: str) -> str:
    return resources.files("qholonomic.data").joinpath(name).read_text()


def _name_k(text: str, prefix: str) -> int | None:
    if text.startswith(prefix + ":"):
        try:
            return int(text[len(prefix) + 1:])
        except ValueError:
            raise UsageError(f"bad index in {text!r}") from None
    return None


def load_operator(text: str) -> WeylElement:
    k = _name_k(text, "gelca")
    if k is not None:
        return printed_recursion_element(k)
    body = _read(text).strip()
    if body.startswith("{"):
        return WeylElement.from_json(_json(body))
    return WeylElement.parse(body)


def load_skein(text: str) -> SkeinElement:
    k = _name_k(text, "gelca-skein")
    if k is not None:
        return gelca_element(k)
    body = _read(text).strip()
    if body.startswith("{"):
        return SkeinElement.from_json(_json(body))
    return SkeinElement.parse(body)


def load_braid(text: str):
    from .oracle.jones import BraidWord

    if text == "trefoil":
        return BraidWord.from_json(_bundled("trefoil.json"))
    k = _name_k(text, "torus")
    if k is not None:
        return BraidWord.torus(k)
    try:
        return BraidWord.from_json(_json(_read(text)))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"invalid JSON: {e}") from None


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = str(text).partition("..")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"range must look like a..b, got {text!r}") from None
    if not sep or a > b:
        raise UsageError(f"range must look like a..b with a <= b, got {text!r}")
    return a, b


def parse_seeds(text: str) -> list[list[Fraction]]:
    try:
        return [[Fraction(v) for v in part.split(",") if v.strip()] for part in text.split(";")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad seeds {text!r}; use e.g. '1;0;0'") from None


# ---------------------------------------------------------------------------
# subcommands; each returns (result dict, summary lines, passed)


def _convention(cfg) -> Convention:
    return Convention(gelca_variable=cfg["gelca_t"], mirror=cfg["mirror"], shift=cfg["shift"])


def _explicit_convention(cfg) -> bool:
    return bool(cfg["gelca_t"] or cfg["mirror"] or cfg["shift"])


def cmd_phi(args, cfg):
    if args.inverse:
        x = load_operator(args.element)
        s = phi_inverse(x)
        return {"input": x.to_json(), "skein": s.to_json(), "text": str(s)}, [f"phi^-1({x}) = {s}"], True
    s = load_skein(args.element)
    x = phi(s)
    return {"input": s.to_json(), "operator": x.to_json(), "text": str(x)}, [f"phi({s}) = {x}"], True


def cmd_mul(args, cfg):
    if args.ring == "skein":
        a, b = load_skein(args.left), load_skein(args.right)
        p = skein_mul(a, b)
        return {"ring": "skein", "product": p.to_json(), "text": str(p)}, [f"({a}) * ({b}) = {p}"], True
    a, b = load_operator(args.left), load_operator(args.right)
    p = weyl_mul(a, b)
    return {"ring": "weyl", "product": p.to_json(), "text": str(p)}, [f"({a}) * ({b}) = {p}"], True


def _sequence(args, cfg, margin=0, mirror=False):
    from .oracle.jones import JonesSequence

    if args.table:
        seq = JonesSequence.from_json(_json(_read(args.table)))
        if mirror:
            seq = JonesSequence(seq.label + "[mirror]", {n: v.invert_variable() for n, v in seq.values.items()},
                                seq.normalized, not seq.mirror, seq.braid)
        return seq
    if args.braid:
        lo, hi = parse_range(cfg["range"])
        need = max(abs(lo), abs(hi)) + margin
        return JonesSequence.from_braid(load_braid(args.braid), need, mirror=mirror, cache_dir=cfg["cache_dir"])
    raise UsageError("give --braid or --table")


def cmd_verify(args, cfg):
    from .oracle.jones import verify_recursion

    x = load_operator(args.operator)
    targets = [("reduced", x)]
    if args.full:
        targets.append(("full", weyl_mul(E - E ** -1, x)))
    margin = max(abs(a) for _, op in targets for (a, _), _ in op.items()) + abs(cfg["shift"])
    seq = _sequence(args, cfg, margin)
    if args.normalized:
        seq = seq.normalize()
    lo, hi = parse_range(cfg["range"])
    conv = _convention(cfg) if _explicit_convention(cfg) else "auto"
    out, lines, ok = {}, [], True
    chosen = conv
    for name, op in targets:
        rep = verify_recursion(op, seq, lo, hi, chosen)
        if conv == "auto" and rep.passed:
            chosen = rep.convention
        out[name] = {"operator": op.to_json(), **rep.to_json()}
        ok = ok and rep.passed
        bad = rep.failures()
        lines.append(f"{name}: {'PASS' if rep.passed else 'FAIL'} on n={lo}..{hi} under {rep.convention.tag()}"
                     + (f"; nonzero at {bad}" if bad else ""))
    out["sequence"] = seq.label
    return out, lines, ok


def _prepared_operator(args, cfg) -> WeylElement:
    x = load_operator(args.operator)
    if cfg["gelca_t"]:
        x = x.gelca_variable()
    if args.normalize:
        x = normalize_annihilator(x)
    return x


def cmd_hierarchy(args, cfg):
    x = _prepared_operator(args, cfg)
    h = build_hierarchy(x, cfg["order"])
    inv = degree_invariants(h.P, cfg["order"])
    res = {"operator": x.to_json(), **h.to_json(), "levels": [op.to_json() for op in h.levels],
           "degree_route": {"l": inv.l, "d": inv.d, "d_min_rule": inv.d_min, "nonzero_m": list(inv.nonzero)}}
    lines = [f"P = {h.P}", f"l = {h.l}, d = {h.d}, regular = {str(h.regular).lower()}"]
    lines += [f"D_{m} = {op}" for m, op in enumerate(h.ops)]
    return res, lines, True


def cmd_solve(args, cfg):
    x = _prepared_operator(args, cfg)
    h = build_hierarchy(x, max(cfg["order"], cfg["loops"]))
    point = Fraction(cfg["expansion_point"])
    jets = solve_hierarchy(h, parse_seeds(args.seeds), cfg["loops"], cfg["jet_order"], point)
    rows = hierarchy_residuals(h, jets)
    ok = all(r.vanishes for r in rows)
    res = {"l": h.l, "d": h.d, **jets.to_json(),
           "rows": [{"row": r.row, "order": r.order, "vanishes": r.vanishes} for r in rows]}
    lines = [f"Q_{k} jet at u={point}: ({', '.join(map(str, j))})" for k, j in enumerate(jets.jets)]
    lines.append(f"hierarchy rows vanish: {str(ok).lower()}")
    return res, lines, ok


def cmd_extract(args, cfg):
    from .oracle.jones import extract_loop

    seq = _sequence(args, cfg, mirror=cfg["mirror"]).normalize()
    jets = extract_loop(seq, cfg["loops"], cfg["order"])
    res = {"sequence": seq.label, **jets.to_json()}
    lines = [f"Q_{k} jet at u=1: ({', '.join(map(str, j))})" for k, j in enumerate(jets.jets)]
    ok = True
    if args.check_operator:
        x = load_operator(args.check_operator)
        if cfg["gelca_t"]:
            x = x.gelca_variable()
        h = build_hierarchy(normalize_annihilator(x), cfg["order"] + 2)
        rows = hierarchy_residuals(h, jets)
        ok = bool(rows) and all(r.vanishes for r in rows)
        res["rows"] = [{"row": r.row, "order": r.order, "vanishes": r.vanishes} for r in rows]
        lines.append(f"hierarchy rows of the normalised operator vanish: {str(ok).lower()}")
    return res, lines, ok


def cmd_oracle(args, cfg):
    from .oracle import backend
    from .oracle.jones import JonesSequence

    b = load_braid(args.braid)
    lo, hi = parse_range(cfg["range"])
    seq = JonesSequence.from_braid(b, max(abs(lo), abs(hi)), mirror=cfg["mirror"], cache_dir=cfg["cache_dir"])
    vals = {str(n): str(seq(n)) for n in range(lo, hi + 1)}
    return {"braid": b.to_json(), "mirror": cfg["mirror"], "backend": backend(), "values": vals}, \
        [f"J_{n} = {v}" for n, v in vals.items()], True


COMMANDS = {
    "phi": cmd_phi,
    "mul": cmd_mul,
    "verify": cmd_verify,
    "hierarchy": cmd_hierarchy,
    "solve": cmd_solve,
    "extract": cmd_extract,
    "oracle": cmd_oracle,
}


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, help="truncation order M (default 4)")
    common.add_argument("--loops", type=int, help="number of loop coefficients K (default 3)")
    common.add_argument("--jet-order", dest="jet_order", type=int, help="Taylor order of the jets (default 4)")
    common.add_argument("--range", help="sample range a..b (default -6..6)")
    common.add_argument("--mirror", action="store_true", default=None, help="use J_n(q^-1)")
    common.add_argument("--shift", type=int, help="compare against J_{n+shift}")
    common.add_argument("--gelca-t", dest="gelca_t", action="store_true", default=None,
                        help="read the operator's q and Q as q^(1/2) and Q^(1/2)")
    common.add_argument("--expansion-point", dest="expansion_point", help="expansion point u0 (default 1)")
    common.add_argument("--cache-dir", dest="cache_dir", help="directory for the colored Jones cache")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--config", help="JSON file with defaults for the flags above")

    p = argparse.ArgumentParser(prog="qholonomic", description="q-holonomic operator toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phi", parents=[common], help="skein element to operator (or back with --inverse)")
    s.add_argument("element")
    s.add_argument("--inverse", action="store_true")

    s = sub.add_parser("mul", parents=[common], help="multiply in the skein or Weyl ring")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--ring", choices=("skein", "weyl"), default="weyl")

    s = sub.add_parser("verify", parents=[common], help="check an operator against a sequence")
    s.add_argument("operator")
    s.add_argument("--braid")
    s.add_argument("--table", help="JSON sample table {'values': {n: poly}}")
    s.add_argument("--full", action="store_true", help="also check (E - E^-1) times the operator")
    s.add_argument("--normalized", action="store_true", help="divide the sequence by [n] first")

    for name, helptext in (("hierarchy", "emit P, l, d and D_0..D_M"), ("solve", "solve the hierarchy for jets")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("operator")
        s.add_argument("--normalize", action="store_true", help="normalise the annihilator to J/[n] first")
        if name == "solve":
            s.add_argument("--seeds", required=True, help="initial derivatives per loop, e.g. '1;0;0'")

    s = sub.add_parser("extract", parents=[common], help="loop jets from a sequence")
    s.add_argument("--braid")
    s.add_argument("--table")
    s.add_argument("--check-operator", dest="check_operator",
                   help="also check the jets against this operator's normalised hierarchy")

    s = sub.add_parser("oracle", parents=[common], help="colored Jones polynomials of a braid closure")
    s.add_argument("--braid", required=True)
    return p


def resolve_config(args) -> dict:
    """Flags beat the config file, which beats the defaults."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        cfg.update(data)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if cfg["range"] is not None:
        parse_range(cfg["range"])
    for key in ("order", "loops", "jet_order"):
        if not isinstance(cfg[key], int) or cfg[key] < 0 or cfg[key] > 12:
            raise UsageError(f"{key} must be an integer in 0..12")
    return cfg


def _emit(report: dict, path: str | None):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command, "version": __version__}
    output = getattr(args, "output", None)
    try:
        cfg = resolve_config(args)
        report["config"] = cfg
        result, summary, ok = COMMANDS[args.command](args, cfg)
        report.update(result=result, summary=summary, status="PASS" if ok else "FAIL")
        code = EXIT_OK if ok else EXIT_FAIL
    except ResourceLimit as e:
        report.update(status="ERROR", reason={"kind": "resource-limit", "message": str(e)})
        code = EXIT_RESOURCE
    except (ParseError, OutOfRange) as e:
        report.update(status="ERROR", reason={"kind": "parse-error", "message": str(e)})
        code = EXIT_PARSE
    except QHolonomicError as e:
        report.update(status="FAIL", reason={"kind": type(e).__name__, "message": str(e)})
        code = EXIT_FAIL
    except (ValueError, KeyError) as e:
        report.update(status="ERROR", reason={"kind": "parse-error", "message": str(e)})
        code = EXIT_PARSE
    _emit(report, output)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
