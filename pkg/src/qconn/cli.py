"""Command-line front end.

Exit codes: 0 when the command succeeds and the property holds, 1 when the
property fails (the witness or counterexample is printed), 2 on bad input or
an exceeded budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .laws import check_quantale_laws
from .quantale import EXT, INF, BudgetError, OmegaQuantale, QuantaleError
from .scales import (
    ALL,
    BOUNDED_EXISTS,
    STRICT,
    UNIFORM,
    WEAK,
    BoundedBelowFixed,
    ExpansionRate,
    Scale,
    ScaleSystemError,
    canonical_finest_scale,
    constant_scale,
    find_walk,
    is_sigma_connected,
    r_components,
)
from .spaces import FiniteTopSpace, SpaceError, VMetricSpace, flagg_metrize
from . import verify as V

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

THEOREM_IDS = sorted(V.THEOREMS)


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# instances


def random_instance(kind: str, n: int, seed: int):
    """Deterministic random topology, Flagg metric, or extended-rational metric."""
    if n < 1 or n > 64:
        raise InputError("points must be between 1 and 64")
    rng = random.Random(seed)
    if kind == "topology":
        return V.random_topology(n, rng)
    if kind == "flagg":
        return flagg_metrize(V.random_topology(n, rng))
    if kind == "metric":
        d = [[Fraction(0) if i == j else _random_distance(rng) for j in range(n)] for i in range(n)]
        # shortest-path closure repairs the triangle inequality
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if d[i][k] + d[k][j] < d[i][j]:
                        d[i][j] = d[i][k] + d[k][j]
        return VMetricSpace(EXT, [f"p{i}" for i in range(n)], d)
    raise InputError(f"unknown instance kind {kind!r}")


def _random_distance(rng: random.Random):
    if rng.random() < 0.1:
        return INF
    return Fraction(rng.randint(1, 16), rng.choice([1, 2, 4]))


# --------------------------------------------------------------------------
# argument handling


def _read_doc(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return io.loads(text)


def _load_space(path: str | None):
    if path is None:
        raise InputError("--in is required")
    doc = _read_doc(path)
    kind = doc.get("type") if isinstance(doc, dict) else None
    if kind == "topology":
        return io.topology_from_json(doc)
    if kind == "metric":
        return io.metric_from_json(doc)
    raise InputError("input must be a topology or metric document")


def _load_metric(path: str | None) -> VMetricSpace:
    X = _load_space(path)
    return flagg_metrize(X) if isinstance(X, FiniteTopSpace) else X


def _parse_value(q, raw: str):
    if q == EXT:
        return io.value_from_json(q, raw)
    try:
        return io.value_from_json(q, json.loads(raw))
    except json.JSONDecodeError:
        raise InputError(f"omega values are JSON lists of index lists, got {raw!r}") from None


def _scale(args, M: VMetricSpace) -> Scale:
    picked = [a for a in (args.scale, args.uniform) if a is not None] + ([True] if args.canonical else [])
    if len(picked) != 1:
        raise InputError("give exactly one of --scale FILE, --canonical, --uniform EPS")
    if args.canonical:
        return canonical_finest_scale(M)
    if args.uniform is not None:
        return constant_scale(M, _parse_value(M.quantale, args.uniform))
    return io.scale_from_json(_read_doc(args.scale), M)


def _system(spec: str, M: VMetricSpace):
    if spec == "all":
        return ALL
    if spec == "uniform":
        return UNIFORM
    if spec == "bounded-exists":
        return BOUNDED_EXISTS
    if spec.startswith("bounded:"):
        return BoundedBelowFixed({M.quantale: _parse_value(M.quantale, spec[len("bounded:"):])})
    if spec.startswith("expansion:"):
        return ExpansionRate(io.alpha_from_json(_read_doc(spec[len("expansion:"):]), M.quantale))
    raise InputError(f"unknown scale system {spec!r}")


def _point(M: VMetricSpace, raw: str) -> int:
    if raw in M.points:
        return M.points.index(raw)
    try:
        i = int(raw)
    except ValueError:
        raise InputError(f"unknown point {raw!r}") from None
    if not 0 <= i < M.n:
        raise InputError(f"point index {i} out of range")
    return i


def _flags(args) -> dict:
    skip = {"func", "format", "out"}
    return {k.rstrip("_"): v for k, v in sorted(vars(args).items()) if k not in skip and v is not None and v is not False}


# --------------------------------------------------------------------------
# commands; each returns (exit code, json document, text lines)


def cmd_metrize(args):
    X = _load_space(args.in_)
    if not isinstance(X, FiniteTopSpace):
        raise InputError("metrize expects a topology document")
    doc = io.metric_to_json(flagg_metrize(X))
    return EXIT_OK, doc, None


def cmd_components(args):
    M = _load_metric(args.in_)
    R = _scale(args, M)
    part = r_components(M, R, args.variant)
    doc = {"type": "components", "flags": _flags(args), "blocks": part.label_blocks(M), "connected": part.connected}
    text = [f"{len(part.blocks)} component(s)"] + ["  " + " ".join(b) for b in part.label_blocks(M)]
    return EXIT_OK, doc, text


def cmd_walk(args):
    M = _load_metric(args.in_)
    R = _scale(args, M)
    x, z = _point(M, args.from_), _point(M, args.to)
    w = find_walk(M, R, x, z, args.variant)
    doc = {"type": "walk", "flags": _flags(args), "walk": None if w is None else list(w.points)}
    if w is None:
        return EXIT_FAIL, doc, [f"no walk from {M.points[x]} to {M.points[z]}"]
    return EXIT_OK, doc, [" -> ".join(w.points), f"{w.steps} step(s)"]


def _connected(args, system: str):
    M = _load_metric(args.in_)
    sigma = _system(system, M)
    v = is_sigma_connected(M, sigma, budget=args.budget, variant=args.variant, seed=args.seed)
    witness = None if v.witness is None else io.scale_to_json(v.witness)
    doc = {
        "type": "verdict",
        "flags": _flags(args),
        "system": system,
        "connected": v.connected,
        "exhaustive": v.exhaustive,
        "witness": witness,
    }
    text = [("connected" if v.connected else "not connected") + f" ({system}, {'exhaustive' if v.exhaustive else 'sampled'})"]
    if v.witness is not None:
        blocks = r_components(M, v.witness, args.variant).label_blocks(M)
        text.append("separating scale components: " + " | ".join(" ".join(b) for b in blocks))
    return (EXIT_OK if v.connected else EXIT_FAIL), doc, text


def cmd_connected(args):
    return _connected(args, "all")


def cmd_uniform_connected(args):
    return _connected(args, "uniform")


def cmd_sigma_connected(args):
    return _connected(args, args.system)


def cmd_verify(args):
    corpus = V.Corpus.parse(args.corpus, args.seed)
    tid = args.theorem
    sigma = (args.system or "all").split(":")[0]
    if tid == "metrization":
        reports = [V.verify_metrization(corpus)]
    elif tid == "connectedness-equivalence":
        reports = [V.verify_connectedness_equivalence(corpus)]
    elif tid == "compactness":
        reports = [V.verify_compactness_theorem(corpus)]
    elif tid == "component-properties":
        reports = [V.verify_component_properties(corpus)]
    elif tid == "sigma-lemma":
        reports = [V.verify_sigma_lemma(corpus, sigma)]
    elif tid == "hierarchy":
        reports = [V.verify_hierarchy(corpus)]
    elif tid == "step-variants":
        reports = [V.verify_alterstep(corpus)]
    elif tid == "structure":
        count = corpus.count if corpus.kind == "random" else 500
        reports = V.verify_structure_theorems(count, args.seed)
    elif tid == "interval-product":
        reports = [V.verify_interval_and_product(factor_points=min(corpus.n, 3))]
    else:
        raise InputError(f"unknown theorem {tid!r}")
    ok = all(r.ok for r in reports)
    doc = {"type": "verification", "flags": _flags(args), "reports": [r.to_json(args.timing) for r in reports]}
    text = []
    for r in reports:
        text.append(r.line())
        text += ["  note: " + n for n in r.notes]
        if r.counterexample:
            text.append("  counterexample: " + json.dumps(r.counterexample, sort_keys=True))
    return (EXIT_OK if ok else EXIT_FAIL), doc, text


def cmd_laws(args):
    spec = args.quantale
    if spec in ("ext", "ext_rational"):
        q = EXT
    elif spec.startswith("omega:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad quantale {spec!r}") from None
        q = OmegaQuantale([f"s{i}" for i in range(k)])
    else:
        raise InputError("quantale must be ext_rational or omega:N")
    rep = check_quantale_laws(q, budget=min(args.budget, 10**5), seed=args.seed)
    doc = {"type": "laws", "flags": _flags(args), **rep.to_json()}
    text = [f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.cases} cases{'' if r.exhaustive else ', sampled'})" for r in rep.results]
    return (EXIT_OK if rep.ok else EXIT_FAIL), doc, text


def cmd_random(args):
    inst = random_instance(args.kind, args.points, args.seed)
    if isinstance(inst, FiniteTopSpace):
        return EXIT_OK, io.topology_to_json(inst), None
    return EXIT_OK, io.metric_to_json(inst), None


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qconn", description="Connectedness of finite quantale-valued metric spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, inp=True):
        if inp:
            sp.add_argument("--in", dest="in_", metavar="FILE", help="input document ('-' for stdin)")
        sp.add_argument("--out", metavar="FILE")
        sp.add_argument("--format", choices=["text", "json"], default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=10**6)

    def scale_args(sp):
        sp.add_argument("--scale", metavar="FILE")
        sp.add_argument("--canonical", action="store_true")
        sp.add_argument("--uniform", metavar="EPS")
        sp.add_argument("--variant", choices=[STRICT, WEAK], default=STRICT)

    sp = sub.add_parser("metrize", help="Flagg metric of a topology")
    common(sp)
    sp.set_defaults(func=cmd_metrize)

    sp = sub.add_parser("components", help="components of a scale")
    common(sp)
    scale_args(sp)
    sp.set_defaults(func=cmd_components)

    sp = sub.add_parser("walk", help="shortest walk between two points")
    common(sp)
    scale_args(sp)
    sp.add_argument("--from", dest="from_", required=True)
    sp.add_argument("--to", required=True)
    sp.set_defaults(func=cmd_walk)

    for name, fn in (("connected", cmd_connected), ("uniform-connected", cmd_uniform_connected), ("sigma-connected", cmd_sigma_connected)):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--variant", choices=[STRICT, WEAK], default=STRICT)
        if name == "sigma-connected":
            sp.add_argument("--system", required=True, help="all|uniform|bounded:EPS|bounded-exists|expansion:FILE")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("verify", help="check a theorem on a corpus")
    common(sp, inp=False)
    sp.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    sp.add_argument("--corpus", default="exhaustive:3")
    sp.add_argument("--system", help="scale system for sigma-lemma: all|uniform|bounded")
    sp.add_argument("--timing", action="store_true", help="include run time in JSON (breaks byte-identical reruns)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("laws", help="check the quantale axioms")
    common(sp, inp=False)
    sp.add_argument("--quantale", required=True, help="ext_rational or omega:N")
    sp.set_defaults(func=cmd_laws)

    sp = sub.add_parser("random", help="random instance")
    common(sp, inp=False)
    sp.add_argument("--kind", choices=["topology", "flagg", "metric"], default="topology")
    sp.add_argument("--points", type=int, required=True)
    sp.set_defaults(func=cmd_random)
    return p


def _emit(args, doc, text) -> None:
    if args.format == "json" or text is None:
        out = io.dumps(doc)
    else:
        out = "\n".join(text) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, doc, text = args.func(args)
        _emit(args, doc, text)
        return code
    except (InputError, io.DocumentError, QuantaleError, SpaceError, ScaleSystemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
