"""Command-line surface.

Every subcommand reads canonical JSON files and writes canonical JSON to
stdout (``--format text`` switches to a human-readable sketch).  Identical
inputs produce byte-identical outputs.  Exit codes: 0 ok, 1 validation
error, 2 budget exceeded, 3 a verification subcommand found a concrete
counterexample (which is always printed).

Operation strings for ``apply`` are read left-to-right and applied
left-to-right: ``--ops "*{1} +{2} (1 2)"`` twists at 1, loop-complements
at 2, then relabels.  Inside a single braces token the letters are also
left-to-right, so the token ``*+{1}`` twists first; it therefore denotes
the flip whose canonical token is ``+*``.  Flip value tokens elsewhere
(``--gvec``, ``--g``, reports) use the canonical names ``1 * + *+ +* ~``,
whose words apply rightmost-first.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .errors import BudgetError, ValidationError
from .multimatroid import (
    Multimatroid,
    Projection,
    TransversalTriple,
    extract,
    is_multimatroid,
    is_tight,
    lift,
    orbit_via_lift,
)
from .orbit_engine import orbit, stabilizer_search, uniformize
from .ribbon import RibbonGraph, delta_matroid_of, medial, verify_medial_lift
from .set_system import SetSystem, VF_SAFE_DEFAULT_CAP, is_delta_matroid, is_vf_safe
from .twuality_group import (
    BAR,
    ONE,
    PLUS,
    STAR,
    TwualityElement,
    act,
    apply_flip,
    flip_mul,
    parse_flip,
    parse_perm,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{message}\n{self.format_usage()}")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def _emit(payload, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
        return
    for line in _text_lines(payload, ""):
        sys.stdout.write(line + "\n")


def _text_lines(value, indent):
    if isinstance(value, dict):
        for key in sorted(value):
            inner = value[key]
            if isinstance(inner, (dict, list)):
                yield f"{indent}{key}:"
                yield from _text_lines(inner, indent + "  ")
            else:
                yield f"{indent}{key}: {json.dumps(inner)}"
    elif isinstance(value, list):
        for inner in value:
            if isinstance(inner, (dict, list)):
                yield from _text_lines(inner, indent + "  ")
            else:
                yield f"{indent}- {json.dumps(inner)}"
    else:
        yield f"{indent}{json.dumps(value)}"


_OPS_SCANNER = re.compile(
    r"(?P<flip>[*+~1]+\{[0-9,\s]*\})"
    r"|(?P<cycles>(?:\([0-9,\s]*\))+)"
    r"|(?P<oneline>\[[0-9,\s]*\])"
    r"|(?P<junk>\S+)"
)


def _parse_ops(text: str, n: int):
    """Left-to-right operation list: flip-word tokens with braces, plus
    permutations in cycle or one-line notation."""
    ops = []
    pos = 0
    for m in _OPS_SCANNER.finditer(text):
        if text[pos : m.start()].strip():
            raise ValidationError(f"bad operation token {text[pos:m.start()].strip()!r}")
        pos = m.end()
        if m.group("junk"):
            raise ValidationError(f"bad operation token {m.group('junk')!r}")
        if m.group("cycles") or m.group("oneline"):
            ops.append(("perm", parse_perm(m.group(0), n)))
            continue
        word, body = m.group("flip")[:-1].split("{", maxsplit=1)
        flip = ONE
        for ch in word:
            step = {"1": ONE, "*": STAR, "+": PLUS, "~": BAR}[ch]
            flip = flip_mul(step, flip)
        elems = [int(x) for x in re.split(r"[,\s]+", body.strip()) if x]
        if len(set(elems)) != len(elems):
            raise ValidationError(f"repeated element in {m.group(0)!r}")
        ops.append(("flip", flip, elems))
    if text[pos:].strip():
        raise ValidationError(f"bad operation token {text[pos:].strip()!r}")
    return ops


def _parse_triple(text: str | None, n: int) -> TransversalTriple:
    if text is None:
        return TransversalTriple.reference(n)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad transversal triple {text!r}: {exc}") from None
    if isinstance(data, dict):
        tau = TransversalTriple.from_json(data)
    else:
        tau = TransversalTriple(data)
    if tau.n != n:
        raise ValidationError(f"triple covers {tau.n} classes, expected {n}")
    return tau


def _parse_projection(text: str | None, n: int) -> Projection:
    if text is None:
        return Projection.identity(n)
    return Projection(parse_perm(text, n))


def _parse_gvec(text: str, n: int):
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    if len(tokens) != n:
        raise ValidationError(f"flip vector has {len(tokens)} entries, expected {n}")
    return tuple(parse_flip(t) for t in tokens)


def _cmd_check(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    witness = is_delta_matroid(D)
    cap = args.max_n if args.max_n is not None else VF_SAFE_DEFAULT_CAP
    payload = {
        "n": D.n,
        "proper": D.is_proper,
        "normal": D.is_normal,
        "delta_matroid": witness.valid,
        "witness": witness.to_json(),
        "vf_safe": is_vf_safe(D, max_n=cap),
    }
    return payload, 0


def _cmd_apply(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    for op in _parse_ops(args.ops, D.n):
        if op[0] == "perm":
            D = act(TwualityElement((ONE,) * D.n, op[1]), D)
        else:
            _, flip, elems = op
            for i in elems:
                D = apply_flip(D, flip, i)
    return D.to_json(), 0


def _cmd_orbit(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    mode = "iota" if args.iota else "full"
    return orbit(D, mode=mode, max_n=args.max_n).to_json(), 0


def _cmd_selftwual(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    mode = "uniform" if args.uniform_only else "all"
    hits = stabilizer_search(D, mode=mode, max_n=args.max_n)
    return {"count": len(hits), "hits": [h.to_json() for h in hits]}, 0


def _cmd_uniformize(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    gvec = _parse_gvec(args.gvec, D.n)
    mu = parse_perm(args.mu, D.n)
    g = parse_flip(args.g)
    return uniformize(D, gvec, mu, g).to_json(), 0


def _cmd_lift(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    tau = _parse_triple(args.tau, D.n)
    sigma = _parse_projection(args.sigma, D.n)
    kwargs = {} if args.max_n is None else {"max_n": args.max_n}
    return lift(D, tau, sigma, **kwargs).to_json(), 0


def _cmd_extract(args) -> tuple[dict, int]:
    Z = Multimatroid.from_json(_load_json(args.file))
    tau = _parse_triple(args.tau, Z.n)
    sigma = _parse_projection(args.sigma, Z.n)
    return extract(Z, tau, sigma).to_json(), 0


def _cmd_mm_check(args) -> tuple[dict, int]:
    Z = Multimatroid.from_json(_load_json(args.file))
    kwargs = {} if args.max_n is None else {"max_n": args.max_n}
    ok, witness = is_multimatroid(Z, **kwargs)
    tight, tight_witness = is_tight(Z, **kwargs)
    return {
        "n": Z.n,
        "multimatroid": ok,
        "witness": witness,
        "tight": tight,
        "tight_witness": tight_witness,
    }, 0


def _cmd_orbit_via_lift(args) -> tuple[dict, int]:
    D = SetSystem.from_json(_load_json(args.file))
    tau = _parse_triple(args.tau, D.n)
    sigma = _parse_projection(args.sigma, D.n)
    mode = "iota" if args.iota else "full"
    elements = orbit_via_lift(D, tau, sigma, mode=mode, max_n=args.max_n)
    return {"size": len(elements), "elements": [d.to_json() for d in elements]}, 0


def _cmd_ribbon(args) -> tuple[dict, int]:
    G = RibbonGraph.from_json(_load_json(args.file))
    if args.what == "dm":
        return delta_matroid_of(G).to_json(), 0
    if args.what == "medial":
        return medial(G).to_json(), 0
    kwargs = {} if args.max_n is None else {"max_e": args.max_n}
    report = verify_medial_lift(G, **kwargs)
    return report.to_json(), 0 if report.equal else 3


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--max-n", type=int, default=None, help="override the hard budget cap")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; output is independent of it")

    parser = _Parser(prog="twuality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.add_argument("file")
        p.set_defaults(fn=fn)
        return p

    add("check", _cmd_check, help="properness / normality / exchange axiom / vf-safety report")
    p = add("apply", _cmd_apply, help="apply a left-to-right operation string")
    p.add_argument("--ops", required=True)
    p = add("orbit", _cmd_orbit, help="breadth-first orbit enumeration")
    p.add_argument("--iota", action="store_true", help="flips only, no relabeling")
    p = add("selftwual", _cmd_selftwual, help="search for stabilizing group elements")
    p.add_argument("--uniform-only", action="store_true")
    p = add("uniformize", _cmd_uniformize, help="conjugate a stabilizer into a uniform one")
    p.add_argument("--gvec", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--g", required=True)
    p = add("lift", _cmd_lift, help="lift a vf-safe system to its 3-matroid")
    p.add_argument("--tau")
    p.add_argument("--sigma")
    p = add("extract", _cmd_extract, help="extract the set system of a 3-matroid")
    p.add_argument("--tau", required=True)
    p.add_argument("--sigma", required=True)
    add("mm-check", _cmd_mm_check, help="multimatroid axioms and tightness report")
    p = add("orbit-via-lift", _cmd_orbit_via_lift, help="orbit through lift extractions")
    p.add_argument("--iota", action="store_true")
    p.add_argument("--tau")
    p.add_argument("--sigma")
    p = sub.add_parser("ribbon", parents=[common], help="ribbon-graph commands")
    p.add_argument("what", choices=("dm", "medial", "verify-t63"))
    p.add_argument("file")
    p.set_defaults(fn=_cmd_ribbon)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ValidationError("--threads must be positive")
        payload, code = args.fn(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except BudgetError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return 2
    _emit(payload, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
