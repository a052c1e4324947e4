"""Command-line front end (``hylosat``)."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import fol, reductions
from .deciders import FragmentError, ROUTES, UnsupportedRoute, decide, verify
from .formula import ParseError, parse, to_text
from .kripke import (
    FiniteLinearModel, ModelError, SegmentedLinearModel, check_finite, check_segmented,
    model_from_json, quotient,
)

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_LIMIT, EXIT_MODEL = 0, 2, 3, 4, 5
EXIT_VERIFY = 1

FORMATS = """\
formula syntax:
  true  false  p (proposition)  #i (nominal)  $x (state variable)
  <> F   [] F   ! F   F & G   F | G   down x. F   @#i F   @$x F   ( F )

model files (JSON):
  {"kind": "finite", "states": 3, "nominals": {"i": 1}, "svars": {"x": 0}}
  {"kind": "segmented", "segments": [{"type": "point", "nominals": ["i"]},
                                     {"type": "dense"},
                                     {"type": "point", "nominals": ["j"]}]}

encoder inputs:
  qbf     forall x. exists y. ((x & y) | (!x & !y))
  dimacs  p cnf 3 1 / 1 2 -3 0
  ord     {"vertices": ["a","b","c"], "successor": [["a","b"],["b","c"]], "s": "a", "t": "c"}
  folp    forall x. exists y. (x < y & P(y))

exit codes:
  0 done, 1 witness failed --verify, 2 parse error, 3 unsupported fragment or route,
  4 resource limit (verdict "unknown"), 5 invalid model file

HYLOSAT_QE_LIMIT overrides the clause ceiling of quantifier elimination.
"""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _err(msg: str) -> None:
    sys.stderr.write(f"hylosat: {msg}\n")


def _pretty_verdict(v) -> str:
    lines = [f"{v.verdict} over {v.frame} (route {v.route})"]
    w = v.witness or {}
    if w.get("assignment"):
        lines.append("assignment: " + ", ".join(f"{k}={x}" for k, x in w["assignment"].items()))
    if w.get("valuation"):
        lines.append("valuation: " + ", ".join(f"{k}={x}" for k, x in w["valuation"].items()))
    if "state" in w:
        lines.append(f"state: {w['state']}")
    model = w.get("model")
    if model and model.get("kind") == "segmented":
        segs = []
        for s in model["segments"]:
            if s["type"] == "dense":
                segs.append("(0,1)")
            else:
                segs.append("[" + ",".join(s["nominals"]) + "]")
        lines.append("model: " + " ".join(segs))
    return "\n".join(lines) + "\n"


def cmd_decide(args) -> int:
    f = parse(_read(args.file))
    try:
        v = decide(f, args.frame, args.route, fallback_states=args.fallback_states)
    except UnsupportedRoute as exc:
        _err(str(exc))
        _emit({"error": "unsupported", "frame": args.frame, "route": exc.route})
        return EXIT_UNSUPPORTED
    out = v.to_json()
    status = EXIT_LIMIT if v.verdict == "unknown" else EXIT_OK
    if args.verify:
        ok = verify(f, v)
        out["verified"] = ok
        if not ok:
            _err("witness does not re-check")
            status = EXIT_VERIFY
    if args.pretty:
        sys.stdout.write(_pretty_verdict(v))
    else:
        _emit(out)
    return status


def cmd_translate(args) -> int:
    f = parse(_read(args.file))
    sys.stdout.write(fol.fol_to_text(fol.close_sentence(f)) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    text = _read(args.file)
    if args.source == "qbf":
        out = reductions.encode_qbf(reductions.parse_qbf(text))
    elif args.source == "dimacs":
        out = reductions.encode_3sat(reductions.parse_dimacs(text))
    elif args.source == "ord":
        out = reductions.encode_ord(reductions.parse_ord(text))
    else:
        out = reductions.encode_folp(reductions.parse_folp(text))
    sys.stdout.write(to_text(out) + "\n")
    return EXIT_OK


def _load_model(path: str):
    try:
        return model_from_json(json.loads(_read(path)))
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not JSON: {exc}") from None


def cmd_check(args) -> int:
    f = parse(_read(args.file))
    m = _load_model(args.model)
    if isinstance(m, FiniteLinearModel):
        result = check_finite(m, args.state, f)
    else:
        result = check_segmented(m, args.state, f)
    _emit(result)
    return EXIT_OK


def cmd_quotient(args) -> int:
    m = _load_model(args.model_file)
    if isinstance(m, SegmentedLinearModel):
        raise ModelError("quotient needs a finite model")
    _emit(quotient(m, args.m).to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hylosat", description="Satisfiability for monotone hybrid logic over N and linear orders.",
        epilog=FORMATS, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="decide satisfiability", epilog=FORMATS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    d.add_argument("--frame", choices=("nat", "lin"), required=True)
    d.add_argument("--route", choices=("auto",) + ROUTES, default="auto",
                   help="force a procedure (default: chosen from the operators used)")
    d.add_argument("--verify", action="store_true", help="re-check the witness of a sat verdict")
    d.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    d.add_argument("--fallback-states", type=int, default=0, metavar="N",
                   help="for unsupported full-operator formulas over lin, search finite models up to N states")
    d.add_argument("file", nargs="?", default="-")
    d.set_defaults(run=cmd_decide)

    t = sub.add_parser("translate", help="print the first-order sentence for satisfiability over N")
    t.add_argument("--to", choices=("fol",), default="fol")
    t.add_argument("file", nargs="?", default="-")
    t.set_defaults(run=cmd_translate)

    e = sub.add_parser("encode", help="encode a source problem as a hybrid formula", epilog=FORMATS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--from", dest="source", choices=("qbf", "dimacs", "ord", "folp"), required=True)
    e.add_argument("file", nargs="?", default="-")
    e.set_defaults(run=cmd_encode)

    c = sub.add_parser("check", help="model-check a formula on a model file", epilog=FORMATS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("--model", required=True)
    c.add_argument("--state", type=int, default=0, help="state (or segment index) to evaluate at")
    c.add_argument("file", nargs="?", default="-")
    c.set_defaults(run=cmd_check)

    q = sub.add_parser("quotient", help="quotient a finite model by modal depth m")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("model_file")
    q.set_defaults(run=cmd_quotient)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (ParseError, fol.FolParseError, reductions.ReductionError) as exc:
        _err(f"parse error: {exc}")
        return EXIT_PARSE
    except FragmentError as exc:
        _err(str(exc))
        return EXIT_UNSUPPORTED
    except fol.ResourceLimit as exc:
        _err(str(exc))
        return EXIT_LIMIT
    except ModelError as exc:
        _err(f"invalid model: {exc}")
        return EXIT_MODEL
    except OSError as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
