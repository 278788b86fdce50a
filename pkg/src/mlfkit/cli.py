"""Command-line front end.  Every report is JSON on stdout (sorted keys).

Exit codes: 0 success / valid / all checks pass, 1 countermodel or failed
verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formula as fm
from .corpus import SplitMix64, random_formula
from .kripke import Model, as_pba, frame_to_json, model_to_json, pba_frame, to_dot
from .labeling import check_translation, hybrid_labeling, product_labeling, verify_labeling
from .multiverse import (
    ControlFamily, Regime, as_kripke_model, check_control_axioms, check_independence,
    has_headroom,
)
from .posets import (
    ADCode, RealHandle, SEQ, avoid_basic_open, coding_certificate, coding_chain,
)
from .theories import Countermodel, s42_decide, search_frames


class UsageError(Exception):
    pass


def dump(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def parse_formula(text):
    try:
        return fm.parse(text)
    except fm.ParseError as e:
        raise UsageError(str(e)) from None


def parse_pba_spec(text):
    """``m=2,n=2`` -> (2, 2)."""
    try:
        fields = dict(part.split("=") for part in text.split(","))
        m, n = int(fields.pop("m")), int(fields.pop("n"))
    except (ValueError, KeyError):
        raise UsageError(f"bad pBA spec {text!r}; expected m=<int>,n=<int>") from None
    if fields or m < 0 or n < 1:
        raise UsageError(f"bad pBA spec {text!r}")
    return m, n


def int_list(text):
    return [int(x) for x in text.split(",") if x != ""]


# ---------------------------------------------------------------------------

def cmd_parse(args):
    f = parse_formula(args.formula)
    dump({"rendered": fm.render(f), "tree": fm.to_json(f), "modal_depth": fm.modal_depth(f),
          "atoms": sorted(fm.atoms(f))}, args.out)
    return 0


def cmd_decide(args):
    f = parse_formula(args.formula)
    res = s42_decide(f, args.m, args.c)
    out = res.to_json()
    out["formula"] = fm.render(f)
    dump(out, args.out)
    return 1 if isinstance(res, Countermodel) else 0


def cmd_frames(args):
    frames = search_frames(args.m, args.c)
    if args.format == "dot":
        text = "\n".join(to_dot(fr, f"pba{i}") for i, fr in enumerate(frames))
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        print(text)
        return 0
    items = []
    for fr in frames:
        p = as_pba(fr)
        items.append({"base_size": p.base_size, "sizes": list(p.sizes()), "frame": frame_to_json(fr)})
    dump({"count": len(items), "frames": items}, args.out)
    return 0


def family_from_args(args) -> ControlFamily:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return ControlFamily.from_json(fh.read())
    ratchet = tuple(int_list(args.ratchet)) if args.ratchet else None
    return ControlFamily(
        buttons=args.buttons, switches=args.switches, nswitch=args.nswitch,
        ratchet=ratchet, t_buttons=args.t_buttons, t_unbounded=args.unbounded,
        regime=Regime(args.regime), sw_decoupled=not args.sw_pinned,
    )


def cmd_multiverse(args):
    try:
        fam = family_from_args(args)
    except (ValueError, TypeError) as e:
        raise UsageError(str(e)) from None
    if args.check == "model":
        model, init = as_kripke_model(fam)
        out = model_to_json(model)
        out["initial"] = str(init)
        out["family"] = fam.to_json()
        dump(out, args.out)
        return 0
    if args.check == "axioms":
        rep = check_control_axioms(fam)
    else:
        rep = check_independence(fam)
    out = rep.to_json()
    out["family"] = fam.to_json()
    dump(out, args.out)
    return 0 if rep.passed else 1


def _labeling_setup(m, n, regime, K, decoupled):
    pba = as_pba(pba_frame(m, [n] * (1 << m)))
    if regime == "hybrid":
        if n < 2:
            pba, n = pba.padded(2), 2
        fam = ControlFamily(buttons=m, nswitch=n, t_buttons=K, t_unbounded=True,
                            regime=Regime.HYBRID, sw_decoupled=decoupled)
        return pba, fam, hybrid_labeling(pba, fam)
    fam = ControlFamily(buttons=m, nswitch=n if n > 1 else 0)
    return pba, fam, product_labeling(pba, fam)


def cmd_verify_labeling(args):
    m, n = parse_pba_spec(args.pba)
    _, fam, lab = _labeling_setup(m, n, args.regime, args.K, not args.sw_pinned)
    interior = None
    if args.regime == "hybrid" and not args.strict:
        def interior(s):
            return has_headroom(fam, s, fam.arity - 1)
    rep = verify_labeling(lab, fam, interior=interior)
    out = rep.to_json()
    out.update({"family": fam.to_json(), "pba": {"m": m, "n": n}, "strict": args.strict})
    dump(out, args.out)
    return 0 if rep.passed else 1


def cmd_translate_check(args):
    m, n = parse_pba_spec(args.pba)
    _, fam, lab = _labeling_setup(m, n, "independent", 0, True)
    mv = as_kripke_model(fam)
    rng = SplitMix64(args.seed)
    names = [f"p{i}" for i in range(args.atoms)]
    worlds = lab.frame.worlds
    failures = []
    for k in range(args.count):
        f = random_formula(rng, names, args.depth, height=args.depth + 2)
        val = {p: [w for w in worlds if rng.below(2)] for p in names}
        model = Model(lab.frame, val)
        if not check_translation(lab, fam, None, model, f, multiverse=mv):
            failures.append({"index": k, "formula": fm.render(f), "valuation": val})
    dump({"pba": {"m": m, "n": n}, "seed": args.seed, "count": args.count,
          "failures": failures, "passed": not failures}, args.out)
    return 0 if not failures else 1


def cmd_posets(args):
    if args.action == "table":
        dump({"enumeration": "weight = sum + length, then lexicographic",
              "table": [[i, list(s)] for i, s in SEQ.table(args.count)]}, args.out)
        return 0
    if args.action == "avoid":
        reals = [RealHandle.eventually_periodic(int_list(h), int_list(c))
                 for h, c in (spec.split(";") for spec in args.real)]
        s = avoid_basic_open(reals)
        dump({"reals": [r.name for r in reals], "open": list(s)}, args.out)
        return 0
    handles = [ADCode(RealHandle.eventually_periodic(int_list(h), int_list(c)))
               for h, c in (spec.split(";") for spec in args.real)]
    A = int_list(args.A)
    if any(not 0 <= i < len(handles) for i in A):
        raise UsageError("A mentions a handle index out of range")
    chain = coding_chain(handles, A, args.steps)
    cert = coding_certificate(chain, handles, A, args.growth)
    out = cert.to_json()
    out.update({"steps": args.steps, "A": sorted(A), "handles": [str(h) for h in handles]})
    dump(out, args.out)
    return 0 if cert.passed else 1


DEFAULT_REALS = ["0;0,1", "1;1", "2;0,2", "3;1,0"]


def build_parser():
    ap = argparse.ArgumentParser(prog="mlfkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and re-render a formula")
    p.add_argument("formula")
    p.add_argument("--out")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("decide", help="bounded S4.2 refutation search")
    p.add_argument("formula")
    p.add_argument("--m", type=int, default=3, help="largest pBA base size")
    p.add_argument("--c", type=int, default=3, help="largest cluster size")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(run=cmd_decide)

    p = sub.add_parser("frames", help="list the pBA frames searched at given bounds")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--out")
    p.set_defaults(run=cmd_frames)

    p = sub.add_parser("multiverse", help="build a control multiverse and check it")
    p.add_argument("--config", help="ControlFamily JSON file (overrides the flags)")
    p.add_argument("--buttons", type=int, default=0)
    p.add_argument("--switches", type=int, default=0)
    p.add_argument("--nswitch", type=int, default=0)
    p.add_argument("--ratchet", help="alpha_max,k_max")
    p.add_argument("--t-buttons", type=int, default=0)
    p.add_argument("--unbounded", action="store_true")
    p.add_argument("--regime", choices=[r.value for r in Regime], default="independent")
    p.add_argument("--sw-pinned", action="store_true",
                   help="hybrid only: pin the n-switch to t_sup mod n")
    p.add_argument("--check", choices=["axioms", "independence", "model"], default="axioms")
    p.add_argument("--out")
    p.set_defaults(run=cmd_multiverse)

    p = sub.add_parser("verify-labeling", help="verify a labeling against its multiverse")
    p.add_argument("--pba", required=True, help="m=<base size>,n=<cluster size>")
    p.add_argument("--regime", choices=["independent", "hybrid"], default="independent")
    p.add_argument("--K", type=int, default=8, help="T-button count (hybrid)")
    p.add_argument("--sw-pinned", action="store_true")
    p.add_argument("--strict", action="store_true",
                   help="do not spare boundary states of the truncated T chain")
    p.add_argument("--out")
    p.set_defaults(run=cmd_verify_labeling)

    p = sub.add_parser("translate-check", help="seeded check of the valuation translation")
    p.add_argument("--pba", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(run=cmd_translate_check)

    p = sub.add_parser("posets", help="sequence table, avoidance, coding certificates")
    p.add_argument("action", choices=["table", "avoid", "certificate"])
    p.add_argument("--count", type=int, default=32)
    p.add_argument("--real", action="append",
                   help="eventually periodic real as head;cycle, e.g. 0,1;2 (repeatable)")
    p.add_argument("--A", default="0,2")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--growth", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(run=cmd_posets)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "real", "unset") is None:
        args.real = list(DEFAULT_REALS)
    try:
        return args.run(args)
    except UsageError as e:
        print(f"mlfkit: error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
