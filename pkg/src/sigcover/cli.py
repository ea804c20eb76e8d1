"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 not flow-admissible,
3 bound not certified (or oracle incomplete / over its limit).
Every option can also be set through an environment variable
``SIGCOVER_<OPTION>`` (for example ``SIGCOVER_STRATEGY=alt1``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .circuits import flow_admissibility_witness
from .generators import MODELS, generate
from .graph import GraphParseError, SignedGraph, StructuralError, components, format_graph, parse_graph
from .pipeline import STRATEGIES, NotFlowAdmissible, bounds, cover_full
from .signature import DEFAULT_SWITCH_LIMIT, InexactSignatureError, minimum_signature
from .verify import (
    ORACLE_CAP,
    ORACLE_EDGE_LIMIT,
    OracleIncomplete,
    OracleInfeasible,
    OracleLimit,
    Requirements,
    oracle_min_cover,
    verify_cover,
)

EXIT_OK, EXIT_PARSE, EXIT_NOT_ADMISSIBLE, EXIT_UNCERTIFIED = 0, 1, 2, 3


class CoverFileError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    seed: int
    strategy: str
    fmt: str
    oracle_cap: int
    oracle_limit: int
    switch_limit: int
    jobs: int


def _env(name: str, default):
    raw = os.environ.get(f"SIGCOVER_{name.upper()}")
    if raw is None:
        return default
    return type(default)(raw)


def _frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise GraphParseError(f"cannot read {path}: {exc}") from exc


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True)


# ---------------------------------------------------------------------------
# cover


def certificate_text(cert) -> str:
    lines = [
        f"m {cert.m}",
        f"n {cert.n}",
        f"eps_N {cert.eps_N}",
        f"x_size {cert.x_size}",
        f"strategy {cert.strategy} (requested {cert.strategy_requested})",
    ]
    for s in STRATEGIES:
        lines.append(f"bound_{s} {_frac(cert.bounds.of(s))}")
    lines += [
        f"bound {_frac(cert.bound)}",
        f"achieved {cert.achieved}",
        f"certified {'yes' if cert.certified else 'no'}",
    ]
    for el in cert.cover.elements:
        lines.append(f"element {el.kind.value} " + " ".join(map(str, sorted(el.edges))))
    for e, w in cert.widths.items():
        lines.append(f"width {e} {w}")
    for a in cert.engine_audits:
        status = a.configuration if a.ok else f"failed: {a.error}"
        lines.append(f"engine {a.case} {status}")
    return "\n".join(lines) + "\n"


def _cover_one(path: str, cfg: RunConfig) -> tuple[int, str]:
    try:
        g = parse_graph(_read(path))
    except GraphParseError as exc:
        return EXIT_PARSE, f"{path}: parse error: {exc}\n"
    try:
        cert = cover_full(g, cfg.strategy, switch_limit=cfg.switch_limit)
    except NotFlowAdmissible as exc:
        msg = f"not flow-admissible (witness edge {exc.witness})"
        if cfg.fmt == "json":
            return EXIT_NOT_ADMISSIBLE, _dump({"input": path, "error": msg, "witness": exc.witness}) + "\n"
        return EXIT_NOT_ADMISSIBLE, f"{path}: {msg}\n"
    except InexactSignatureError as exc:
        return EXIT_UNCERTIFIED, f"{path}: {exc}\n"
    code = EXIT_OK if cert.certified else EXIT_UNCERTIFIED
    if cfg.fmt == "json":
        return code, _dump({"input": path, **cert.to_record()}) + "\n"
    return code, f"# {path}\n" + certificate_text(cert)


def _run_many(fn, cfg: RunConfig) -> int:
    if cfg.jobs > 1 and len(cfg.inputs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(fn, cfg.inputs, [cfg] * len(cfg.inputs)))
    else:
        results = [fn(p, cfg) for p in cfg.inputs]
    worst = EXIT_OK
    for code, text in results:
        (sys.stdout if code in (EXIT_OK, EXIT_UNCERTIFIED) or cfg.fmt == "json" else sys.stderr).write(text)
        if code == EXIT_PARSE or (worst != EXIT_PARSE and code > worst):
            worst = code
    return worst


# ---------------------------------------------------------------------------
# verify


def parse_cover_file(text: str) -> tuple[list[list[int]], Fraction | None]:
    """Element edge lists from a certificate (text or JSON) or from bare lines of edge ids."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            rec = json.loads(stripped.splitlines()[0])
            return [list(el["edges"]) for el in rec["elements"]], None
        except (ValueError, KeyError, TypeError) as exc:
            raise CoverFileError(f"malformed JSON cover: {exc}") from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "element":
            parts = parts[2:]
        elif not parts[0].lstrip("-").isdigit():
            continue  # other certificate rows
        try:
            out.append([int(p) for p in parts])
        except ValueError:
            raise CoverFileError(f"line {lineno}: edge ids must be integers") from None
    if not out:
        raise CoverFileError("cover file has no elements")
    return out, None


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        g = parse_graph(_read(args.graph))
    except GraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        sets, _ = parse_cover_file(_read(args.cover))
    except (CoverFileError, GraphParseError) as exc:
        print(f"cover file error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    twice = frozenset(e.id for e in g.edges if e.is_loop and e.sign < 0) if args.loops_twice else frozenset()
    req = Requirements(max_width=args.max_width, exact_twice=twice,
                       bound=Fraction(args.bound) if args.bound is not None else None)
    rep = verify_cover(g, sets, req)
    if cfg.fmt == "json":
        print(_dump({"valid": rep.valid, "length": rep.length,
                     "violations": [{"kind": v.kind, "detail": v.detail} for v in rep.violations]}))
    else:
        print(f"valid {'yes' if rep.valid else 'no'}")
        print(f"length {rep.length}")
        for v in rep.violations:
            print(f"violation {v.kind}: {v.detail}")
    return EXIT_OK if rep.valid else EXIT_UNCERTIFIED


# ---------------------------------------------------------------------------
# smaller commands


def _load(path: str) -> SignedGraph | None:
    try:
        return parse_graph(_read(path))
    except GraphParseError as exc:
        print(f"{path}: parse error: {exc}", file=sys.stderr)
        return None


def cmd_minimize(args, cfg: RunConfig) -> int:
    g = _load(args.input)
    if g is None:
        return EXIT_PARSE
    try:
        gm, sw, eps = minimum_signature(g, cfg.switch_limit)
    except InexactSignatureError as exc:
        print(f"{exc} (current count {exc.best_bound})", file=sys.stderr)
        return EXIT_UNCERTIFIED
    if cfg.fmt == "json":
        print(_dump({"eps_N": eps, "switched": sorted(sw.vertices),
                     "negative_edges": sorted(gm.negative_ids())}))
    else:
        sys.stdout.write(format_graph(gm, f"eps_N {eps}\nswitched {' '.join(map(str, sorted(sw.vertices)))}"))
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    g = _load(args.input)
    if g is None:
        return EXIT_PARSE
    w = flow_admissibility_witness(g)
    if cfg.fmt == "json":
        print(_dump({"flow_admissible": w is None, "witness": w}))
    else:
        print("flow-admissible" if w is None else f"not flow-admissible: edge {w} lies in no signed circuit")
    return EXIT_OK if w is None else EXIT_NOT_ADMISSIBLE


def cmd_gen(args, cfg: RunConfig) -> int:
    try:
        g = generate(args.model, cfg.seed, args.n, args.m, args.negatives)
    except StructuralError as exc:
        print(f"cannot generate: {exc}", file=sys.stderr)
        return EXIT_PARSE
    adm = flow_admissibility_witness(g) is None
    sys.stdout.write(format_graph(g, f"model {args.model} seed {cfg.seed}\nflow-admissible {'yes' if adm else 'no'}"))
    return EXIT_OK


def cmd_bounds(args, cfg: RunConfig) -> int:
    g = _load(args.input)
    if g is None:
        return EXIT_PARSE
    rows = []
    try:
        for comp in components(g):
            if comp.m == 0:
                continue
            _, _, eps = minimum_signature(comp, cfg.switch_limit)
            rows.append((comp, eps, bounds(comp.m, comp.n, eps)))
        certs = {s: cover_full(g, s, switch_limit=cfg.switch_limit) for s in STRATEGIES}
    except NotFlowAdmissible as exc:
        print(f"not flow-admissible (witness edge {exc.witness})", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except InexactSignatureError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNCERTIFIED
    flags = {s: certs[s].certified and certs[s].strategy == s for s in STRATEGIES}
    if cfg.fmt == "json":
        print(_dump({
            "components": [{"vertices": list(c.vertices), "m": c.m, "n": c.n, "eps_N": e,
                            **{s: _frac(b.of(s)) for s in STRATEGIES}} for c, e, b in rows],
            "total": {s: _frac(certs[s].bounds.of(s)) for s in STRATEGIES},
            "certified": flags,
        }))
        return EXIT_OK
    print(f"{'component':<12}{'m':>4}{'n':>4}{'eps_N':>7}{'main':>10}{'alt1':>10}{'alt2':>10}")
    for k, (c, e, b) in enumerate(rows):
        print(f"{k:<12}{c.m:>4}{c.n:>4}{e:>7}" + "".join(f"{_frac(b.of(s)):>10}" for s in STRATEGIES))
    tot = certs["main"]
    print(f"{'total':<12}{tot.m:>4}{tot.n:>4}{tot.eps_N:>7}"
          + "".join(f"{_frac(certs[s].bounds.of(s)):>10}" for s in STRATEGIES))
    print("certified " + " ".join(f"{s}={'yes' if flags[s] else 'no'}" for s in STRATEGIES))
    return EXIT_OK


def cmd_oracle(args, cfg: RunConfig) -> int:
    g = _load(args.input)
    if g is None:
        return EXIT_PARSE
    try:
        res = oracle_min_cover(g, cfg.oracle_limit, cfg.oracle_cap)
    except OracleInfeasible as exc:
        print(f"not flow-admissible: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (OracleIncomplete, OracleLimit) as exc:
        print(f"oracle incomplete: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    if cfg.fmt == "json":
        print(_dump({"length": res.length, "candidates": res.candidates,
                     "elements": [sorted(c) for c in res.elements]}))
    else:
        print(f"optimum {res.length}")
        print(f"candidates {res.candidates}")
        for c in res.elements:
            print("element " + " ".join(map(str, sorted(c))))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env("seed", 0), help="64-bit seed (default 0)")
    common.add_argument("--strategy", choices=STRATEGIES, default=_env("strategy", "main"))
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default=_env("format", "text"))
    common.add_argument("--oracle-cap", type=int, default=_env("oracle_cap", ORACLE_CAP),
                        help="maximum number of enumerated signed circuits")
    common.add_argument("--oracle-limit", type=int, default=_env("oracle_limit", ORACLE_EDGE_LIMIT),
                        help="maximum edge count for the oracle")
    common.add_argument("--switch-limit", type=int, default=_env("switch_limit", DEFAULT_SWITCH_LIMIT),
                        help="maximum component size for the exact switching search")
    common.add_argument("--jobs", type=int, default=_env("jobs", 1), help="parallel workers over input files")

    p = argparse.ArgumentParser(
        prog="sigcover",
        description="Short signed circuit covers of signed graphs.",
        epilog="exit codes: 0 ok, 1 malformed input, 2 not flow-admissible, "
               "3 bound not certified or oracle incomplete",
    )
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("cover", parents=[common], help="cover a graph and print its certificate")
    c.add_argument("inputs", nargs="+", help="graph files, '-' for standard input")
    v = sub.add_parser("verify", parents=[common], help="check a cover against a graph")
    v.add_argument("graph")
    v.add_argument("cover")
    v.add_argument("--bound", help="maximum total length (integer or p/q)")
    v.add_argument("--max-width", type=int)
    v.add_argument("--loops-twice", action="store_true", help="require width 2 on negative loops")
    for name, helptext in (("minimize-signature", "print a minimum equivalent signature"),
                           ("check-admissible", "report flow-admissibility"),
                           ("bounds", "print the length bounds"),
                           ("oracle", "exact shortest cover of a small graph")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("input")
    gen = sub.add_parser("gen", parents=[common], help="generate a random instance")
    gen.add_argument("--model", choices=MODELS, default="random-multigraph")
    gen.add_argument("--n", type=int, default=5)
    gen.add_argument("--m", type=int, default=8)
    gen.add_argument("--negatives", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    inputs = tuple(getattr(args, "inputs", None) or ())
    cfg = RunConfig(args.command, inputs, args.seed, args.strategy, args.fmt,
                    args.oracle_cap, args.oracle_limit, args.switch_limit, max(1, args.jobs))
    handlers = {
        "verify": cmd_verify,
        "minimize-signature": cmd_minimize,
        "check-admissible": cmd_check,
        "gen": cmd_gen,
        "bounds": cmd_bounds,
        "oracle": cmd_oracle,
    }
    if args.command == "cover":
        return _run_many(_cover_one, cfg)
    return handlers[args.command](args, cfg)


if __name__ == "__main__":
    sys.exit(main())
