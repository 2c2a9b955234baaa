"""Command-line interface: generate, certify, factor, verify, bench.

Exit codes: 0 success/pass, 1 verification or pipeline failure, 2 usage
error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import generators
from .config import ConfigError, PipelineConfig
from .graph import EdgeListError, read_edge_list_file, write_edge_list, write_edge_list_file
from .pipeline import InternalInvariantError, KtFactor, factor_from_dict, kt_factor, verify_factor
from .spectral import SpectralError, certify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

FAMILIES = ("paley", "multipartite", "regular")


class UsageError(Exception):
    pass


def _generate_graph(family: str, q=None, t=None, s=None, n=None, d=None, seed=0):
    def need(**kw):
        missing = [k for k, v in kw.items() if v is None]
        if missing:
            raise UsageError(f"family {family} needs --{' --'.join(missing)}")

    try:
        if family == "paley":
            need(q=q)
            return generators.paley(q)
        if family == "multipartite":
            need(t=t, s=s)
            return generators.complete_multipartite(t, s)
        if family == "regular":
            need(n=n, d=d)
            return generators.random_regular(n, d, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown family {family!r}")


def _load(path: str):
    try:
        return read_edge_list_file(path)
    except (OSError, EdgeListError) as exc:
        raise UsageError(f"cannot read graph {path}: {exc}") from exc


def cmd_generate(args) -> int:
    g = _generate_graph(args.family, args.q, args.t, args.s, args.n, args.d, args.seed)
    if args.output == "-":
        sys.stdout.buffer.write(write_edge_list(g))
    else:
        write_edge_list_file(g, args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    g = _load(args.input)
    c = args.c if args.c is not None else PipelineConfig(t=args.t).resolved().c
    try:
        cert = certify(g, args.t, c, args.tolerance)
    except (SpectralError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    print(cert.to_json())
    return EXIT_OK


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text + "\n")


def cmd_factor(args) -> int:
    g = _load(args.input)
    cfg = PipelineConfig(t=args.t, seed=args.seed, m_override=args.m, epsilon=args.epsilon,
                         enforce_spectral_hypothesis=args.enforce_hypothesis,
                         template_max_degree=args.template_max_degree)
    try:
        result = kt_factor(g, cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    _write_text(args.output, result.to_json())
    if isinstance(result, KtFactor):
        print(f"factor: {len(result.cliques)} cliques via {result.route}", file=sys.stderr)
        return EXIT_OK
    print(f"failure at stage {result.stage} (coverage {result.coverage:.3f})", file=sys.stderr)
    return EXIT_FAIL


def cmd_verify(args) -> int:
    g = _load(args.input)
    try:
        with open(args.factor, encoding="ascii") as fh:
            data = json.load(fh)
        factor = factor_from_dict(data, g.n)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read factor {args.factor}: {exc}") from exc
    report = verify_factor(g, factor)
    if report.passed:
        print("pass")
        return EXIT_OK
    print("fail")
    for v in report.violations[:20]:
        print("  " + " ".join(map(str, v)))
    return EXIT_FAIL


def cmd_bench(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read bench spec: {exc}") from exc
    jobs = spec["jobs"] if isinstance(spec, dict) else spec
    seeds = np.random.SeedSequence(args.seed).generate_state(args.runs * max(1, len(jobs)))
    lines = []
    k = 0
    for job in jobs:
        family = job["family"]
        t = int(job["t"])
        for _ in range(args.runs):
            seed = int(seeds[k])
            k += 1
            g = _generate_graph(family, job.get("q"), job.get("parts"), job.get("s"),
                                job.get("n"), job.get("d"), seed)
            cfg = PipelineConfig(t=t, seed=seed, m_override=job.get("m"),
                                 template_max_degree=job.get("template_max_degree", 40))
            start = time.perf_counter()
            try:
                result = kt_factor(g, cfg)
            except ConfigError as exc:
                raise UsageError(str(exc)) from exc
            millis = round((time.perf_counter() - start) * 1000, 3)
            ok = isinstance(result, KtFactor)
            lines.append(json.dumps({
                "family": family, "n": g.n, "d": g.degree(0) if g.n else 0, "t": t, "seed": seed,
                "outcome": "factor" if ok else "failure",
                "stage": result.route if ok else result.stage,
                "millis": millis,
            }, sort_keys=True))
    _write_text(args.output, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktfactor", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated graph as an edge list")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--q", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("certify", help="print the spectral certificate as JSON")
    c.add_argument("--input", required=True)
    c.add_argument("--t", type=int, required=True)
    c.add_argument("--c", type=float)
    c.add_argument("--tolerance", type=float, default=1e-8)
    c.set_defaults(func=cmd_certify)

    f = sub.add_parser("factor", help="search for a K_t-factor")
    f.add_argument("--input", required=True)
    f.add_argument("--t", type=int, required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--m", type=int)
    f.add_argument("--epsilon", type=float)
    f.add_argument("--enforce-hypothesis", action="store_true")
    f.add_argument("--template-max-degree", type=int, default=40)
    f.add_argument("-o", "--output", required=True)
    f.set_defaults(func=cmd_factor)

    v = sub.add_parser("verify", help="check a factor file against a graph")
    v.add_argument("--input", required=True)
    v.add_argument("--factor", required=True)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run the pipeline over generated instances")
    b.add_argument("--spec", required=True)
    b.add_argument("--runs", type=int, required=True)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
