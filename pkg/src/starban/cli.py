"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check or a numerical
routine fails, 2 on usage or parse errors. Output is JSON unless ``--text``
is given; JSON output is byte-stable for a fixed command and seed.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, bancat, convolution, numkernel, spaces, starcomp, tensornorms
from .errors import NumericalFailure, ParseError, UsageError

SUITES = ("spaces", "bancat", "completion", "posreal", "convolution", "tensornorms")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tol: float = 1e-9
    output: str | None = None
    text: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("tolerance must be positive")


def _run_suite(name: str, max_dim: int | None, seed: int) -> list:
    if name == "spaces":
        return spaces.law_suite(max_dim or 6, seed)
    if name == "bancat":
        return bancat.law_suite(max_dim or 5, seed)
    if name == "completion":
        return [starcomp.law_suite_completion(max_dim or 5)]
    if name == "posreal":
        return [starcomp.law_suite_posreal()]
    if name == "convolution":
        return convolution.law_suite(seed)
    if name == "tensornorms":
        return tensornorms.law_suite(max_dim or 8, seed)
    raise UsageError(f"unknown suite {name!r}")


def cmd_laws(args, cfg: RunConfig):
    names = SUITES if args.suite == "all" else (args.suite,)
    threads = max(1, args.threads or 1)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda n: _run_suite(n, args.max_dim, cfg.seed), names))
    suites = {}
    for name, reports in zip(names, results):
        suites[name] = {
            "passed": all(r.passed for r in reports),
            "checks": [r.to_json() for r in reports],
        }
    passed = all(s["passed"] for s in suites.values())
    report = {"suites": suites, "passed": passed}
    lines = []
    for name, s in suites.items():
        for check in s["checks"]:
            lines.append(f"{'PASS' if check['passed'] else 'FAIL'}  {name}/{check['check']}")
    lines.append(f"{'all checks passed' if passed else 'some checks FAILED'}")
    return report, "\n".join(lines), EXIT_OK if passed else EXIT_FAILED


def cmd_tensor_gap(args, cfg: RunConfig):
    report = tensornorms.correction_witness(args.rows, args.cols)
    text = (
        f"element: embedded identity of size {min(args.rows, args.cols)} in C^{args.rows} (x) C^{args.cols}\n"
        f"projective {report['projective']:.12g}  hilbert {report['hilbert']:.12g}  "
        f"injective {report['injective']:.12g}\n"
        f"ratio projective/hilbert {report['ratio']:.12g}\n{report['note']}"
    )
    return report, text, EXIT_OK if report["strict_contraction"] else EXIT_FAILED


def _load_text(value: str) -> str:
    path = Path(value)
    try:
        if path.is_file():
            return path.read_text()
    except OSError:
        pass
    return value


def parse_vector(text: str) -> np.ndarray:
    """Accepts ``[(3,0),(4,0)]``, ``[[3,0],[4,0]]``, ``[3, 4j]`` and similar."""
    try:
        data = ast.literal_eval(text.strip())
    except (SyntaxError, ValueError) as exc:
        offset = getattr(exc, "offset", None) or 0
        raise ParseError(f"cannot read vector: {exc.__class__.__name__}", max(0, offset - 1)) from None
    if not isinstance(data, (list, tuple)):
        raise ParseError("vector must be a list", 0)
    coords = []
    for k, item in enumerate(data):
        if isinstance(item, (list, tuple)) and len(item) == 2 and all(isinstance(x, (int, float)) for x in item):
            coords.append(complex(item[0], item[1]))
        elif isinstance(item, (int, float, complex)) and not isinstance(item, bool):
            coords.append(complex(item))
        else:
            raise ParseError(f"entry {k} is not a number or (re, im) pair", 0)
    return np.array(coords, dtype=np.complex128)


def _load_json(value: str, what: str):
    text = _load_text(value)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"cannot read {what} JSON: {exc.msg}", exc.pos) from None


def cmd_norm(args, cfg: RunConfig):
    space = spaces.parse_space(args.space)
    v = parse_vector(_load_text(args.vector))
    value = spaces.norm(space, v)
    report = {"space": spaces.format_space(space), "vector": [[z.real, z.imag] for z in v], "norm": value}
    return report, f"{value:.15g}", EXIT_OK


def cmd_opnorm(args, cfg: RunConfig):
    dom = spaces.parse_space(args.dom)
    cod = spaces.parse_space(args.cod)
    a = numkernel.matrix_from_json(_load_json(args.map, "matrix"))
    rep = spaces.is_contraction(a, dom, cod, tol=cfg.tol, restarts=args.restarts, seed=cfg.seed)
    report = {
        "dom": spaces.format_space(dom),
        "cod": spaces.format_space(cod),
        "estimate": rep.estimate,
        "exact": rep.spectral_checked,
        "is_contraction": rep.passed,
        "witness": rep.to_json()["witness"],
        "restarts": args.restarts,
    }
    kind = "exact" if rep.spectral_checked else "lower bound"
    text = f"operator norm ({kind}): {rep.estimate:.15g}\ncontraction: {rep.passed}"
    return report, text, EXIT_OK


def _align(rows):
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)


def cmd_complete(args, cfg: RunConfig):
    if args.max < 0:
        raise UsageError("--max must be non-negative")
    table = starcomp.completion_table(args.max)
    objs = table["objects"]
    parts = [_align([["object", "dual"]] + [[f"{o}*", table["dual"][o]] for o in objs])]
    for key, sym in (("tensor", "(x)"), ("par", "par"), ("hom_card", "hom")):
        rows = [[sym] + objs] + [[a] + [table[key][a][b] for b in objs] for a in objs]
        parts.append(_align(rows))
    return table, "\n\n".join(parts), EXIT_OK


def cmd_convolve(args, cfg: RunConfig):
    profile = convolution.profile_by_name(args.profile)
    f = convolution.DimFunctor.from_json(_load_json(args.f, "functor"))
    g = convolution.DimFunctor.from_json(_load_json(args.g, "functor"))
    out = convolution.convolve(f, g, profile, args.max_degree)
    report = {"profile": profile.name, "max_degree": args.max_degree, **out.to_json()}
    text = "\n".join(f"{d}: {tok}" for d, tok in report["support"].items()) or "(zero functor)"
    return report, text, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random search (default 0)")
    common.add_argument("--tol", type=float, default=1e-9, help="contraction tolerance (default 1e-9)")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--text", action="store_true", help="human-readable summary instead of JSON")
    common.add_argument("--threads", type=int, default=1, help="worker threads for law suites")

    parser = argparse.ArgumentParser(prog="starban", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laws", parents=[common], help="run invariant suites")
    p.add_argument("--suite", required=True, choices=SUITES + ("all",))
    p.add_argument("--max-dim", type=int, default=None)
    p.set_defaults(handler=cmd_laws)

    p = sub.add_parser("tensor-gap", parents=[common], help="projective vs Hilbert norm witness")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.set_defaults(handler=cmd_tensor_gap)

    p = sub.add_parser("norm", parents=[common], help="norm of a vector in a space expression")
    p.add_argument("--space", required=True)
    p.add_argument("--vector", required=True, help="literal such as [(3,0),(4,0)] or a file containing one")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("opnorm", parents=[common], help="operator norm estimate between space expressions")
    p.add_argument("--dom", required=True)
    p.add_argument("--cod", required=True)
    p.add_argument("--map", required=True, help="matrix JSON or a file containing it")
    p.add_argument("--restarts", type=int, default=64)
    p.set_defaults(handler=cmd_opnorm)

    p = sub.add_parser("complete", parents=[common], help="tables of the completed category")
    p.add_argument("what", choices=["table"])
    p.add_argument("--max", type=int, default=3)
    p.set_defaults(handler=cmd_complete)

    p = sub.add_parser("convolve", parents=[common], help="convolution of finite-support functors")
    p.add_argument("--profile", required=True, choices=["braid", "symmetric"])
    p.add_argument("--f", required=True, help="functor JSON or a file containing it")
    p.add_argument("--g", required=True, help="functor JSON or a file containing it")
    p.add_argument("--max-degree", type=int, default=convolution.DEFAULT_MAX_DEGREE)
    p.set_defaults(handler=cmd_convolve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(command=args.command, seed=args.seed, tol=args.tol, output=args.output, text=args.text)
        report, text, code = args.handler(args, cfg)
    except UsageError as exc:
        print(f"starban: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"starban: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILED
    header = {"command": args.command, "seed": cfg.seed, "version": __version__}
    body = text + "\n" if cfg.text else json.dumps({"header": header, "report": report}, indent=2, sort_keys=True) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
