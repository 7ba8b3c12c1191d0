"""Command line entry point.

Subcommands write CSV (or text/DOT) either to stdout or, with ``--out DIR``,
to ``DIR/<family>_<n>/<artifact>``; family-independent exports go directly
under ``DIR``.  Exit codes: 0 success, 1 usage, 2 infeasible parameters,
3 self-check failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import asymptotics, combinat, green, reps
from .diagram import Family, check, compose, flip, identity
from .errors import FormulaBruteMismatch, RepGapError, StructureMismatch
from .monoids import DEFAULT_BUDGET, enumerate_monoid, export_elements

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_ORACLE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    family: Family | None
    n: int | None
    out: Path | None
    budget: int
    threads: int
    tolerance: float
    args: argparse.Namespace


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("REPGAP_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"REPGAP_THREADS must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, help="output directory (default: stdout)")
    common.add_argument("--threads", type=int, help="worker threads (env REPGAP_THREADS)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum enumerated elements")
    common.add_argument("--tolerance", type=float, default=asymptotics.LOG10_TOLERANCE,
                        help="log10 tolerance for asymptotic checks")

    fam = _Parser(add_help=False)
    fam.add_argument("--family", required=True, help="TL, Mo, pRo, rTL, rMo or rpRo")
    fam.add_argument("--n", type=int, required=True)

    p = _Parser(prog="repgap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("enumerate", parents=[common, fam], help="list all elements")

    e = sub.add_parser("eggbox", parents=[common, fam], help="cell structure")
    e.add_argument("--format", choices=("ascii", "dot"), default="ascii")
    e.add_argument("--method", choices=("auto", "brute", "sandwich"), default="auto")
    e.add_argument("--check", action="store_true", help="verify the structural cell theorems")

    c = sub.add_parser("counts", parents=[common, fam], help="cell sizes per apex class")
    c.add_argument("--mode", choices=("formula", "brute", "both"), default="formula")

    g = sub.add_parser("gram", parents=[common, fam], help="Gram ranks per J-cell")
    g.add_argument("--k", type=int)
    g.add_argument("--field", default="q", help="q or a prime")
    g.add_argument("--method", choices=("auto", "brute", "sandwich"), default="auto")

    gp = sub.add_parser("gap", parents=[common, fam], help="representation gap")
    gp.add_argument("--mode", choices=("exact", "semisimple"), default="exact")
    gp.add_argument("--truncate", choices=("full", "paper"), default="full")
    gp.add_argument("--field", default="q")
    gp.add_argument("--denominator", choices=("full", "truncated"), default="full")
    gp.add_argument("--exclude-edges", action="store_true",
                    help="skip the two extreme k of the window")

    b = sub.add_parser("bounds", parents=[common], help="evaluate the bound expressions")
    b.add_argument("--n-list", default="10,100,1000")

    f = sub.add_parser("figures", parents=[common], help="figure data")
    f.add_argument("--figure", action="append", choices=asymptotics.FIGURE_IDS)
    f.add_argument("--n", type=int, help="override the size each figure is drawn at")

    s = sub.add_parser("selfcheck", parents=[common], help="run the oracle battery")
    s.add_argument("--quick", action="store_true", help="families at n <= 2 only")
    s.add_argument("--inject-fault", action="store_true",
                   help="negative control: validate mirrored diagrams, which must fail")
    return p


def _config(argv: Sequence[str] | None) -> RunConfig:
    args = build_parser().parse_args(argv)
    family = getattr(args, "family", None)
    try:
        family = Family.parse(family) if family is not None else None
    except ValueError as exc:
        raise UsageError(str(exc))
    n = getattr(args, "n", None)
    if n is not None and n < 1:
        raise UsageError("--n must be positive")
    threads = _threads(args.threads)
    if threads < 1:
        raise UsageError("--threads must be positive")
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    if hasattr(args, "field"):
        reps.parse_field(args.field)
    return RunConfig(args.command, family, n, args.out, args.budget, threads, args.tolerance, args)


# ---------------------------------------------------------------- output

def _emit(cfg: RunConfig, name: str, text: str, per_family: bool = True) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    folder = cfg.out / f"{cfg.family.value}_{cfg.n}" if per_family and cfg.family else cfg.out
    folder.mkdir(parents=True, exist_ok=True)
    with open(folder / name, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _csv(header: str, rows: Sequence[str]) -> str:
    return "\n".join([header, *rows]) + "\n"


# ---------------------------------------------------------------- commands

def cmd_enumerate(cfg: RunConfig) -> int:
    import io

    table = enumerate_monoid(cfg.family, cfg.n, budget=cfg.budget)
    buf = io.StringIO()
    export_elements(table, buf)
    _emit(cfg, "elements.txt", buf.getvalue())
    return EXIT_OK


def _structure(cfg: RunConfig, method: str) -> green.GreenStructure:
    return reps.structure_for(cfg.family, cfg.n, method=method, budget=cfg.budget, threads=cfg.threads)


def cmd_eggbox(cfg: RunConfig) -> int:
    s = _structure(cfg, cfg.args.method)
    if cfg.args.check:
        report = green.check_structure(s)
        print(report, file=sys.stderr)
    ext = "dot" if cfg.args.format == "dot" else "txt"
    _emit(cfg, f"eggbox.{ext}", green.eggbox_render(s, cfg.args.format))
    if cfg.out is not None:
        _emit(cfg, "green.csv", _csv(green.GREEN_HEADER, green.green_rows(s)))
    return EXIT_OK


COUNTS_HEADER = "family,n,k,j,right_size,left_size,jcell_size,source"


def formula_counts(fam: Family, n: int) -> list[tuple]:
    """(k, j, right, left, jcell) per apex class from the closed forms."""
    out = []
    if fam is Family.RTL:
        for k in reps.feasible_ks(fam, n):
            r = combinat.cell_count(fam, n, k, None, "right")
            lft = combinat.cell_count(fam, n, k, None, "left")
            out.append((k, k // 2, r, lft, r * lft))
    elif fam.rigid:
        for k in range(2 * n + 1):
            for j in range(k // 2 + 1):
                r = combinat.cell_count(fam, n, k, j, "right")
                if r:
                    lft = combinat.cell_count(fam, n, k, j, "left")
                    out.append((k, j, r, lft, r * lft))
    else:
        halves = combinat.pivotal_half_counts(fam, 2 * n)
        for k in reps.feasible_ks(fam, n):
            out.append((k, "", halves[k], halves[k], halves[k] ** 2))
    return out


def brute_counts(s: green.GreenStructure) -> list[tuple]:
    """Per apex class, read off an enumerated structure (classes must be uniform)."""
    fam = s.family
    classes: dict[tuple, set] = {}
    for j, (k, alpha) in enumerate(s.apex_labels):
        jj = combinat.count_12(alpha) if fam.rigid else ""
        shape = (len(s.cols(j)), len(s.rows(j)), len(s.j_cells[j]))
        classes.setdefault((k, jj), set()).add(shape)
    out = []
    for (k, jj), shapes in sorted(classes.items(), key=lambda t: (t[0][0], str(t[0][1]))):
        if len(shapes) != 1:
            raise StructureMismatch("cells of one apex class differ in shape", (k, jj, sorted(shapes)))
        # columns of a J-cell are its left cells; a right cell holds one element per column
        cols, rows, size = shapes.pop()
        out.append((k, jj, cols, rows, size))
    return out


def cmd_counts(cfg: RunConfig) -> int:
    mode = cfg.args.mode
    rows = []
    formula = formula_counts(cfg.family, cfg.n) if mode in ("formula", "both") else []
    brute = []
    if mode in ("brute", "both"):
        brute = brute_counts(_structure(cfg, "auto"))
    for source, data in (("formula", formula), ("brute", brute)):
        for k, j, r, lft, size in data:
            rows.append(f"{cfg.family.value},{cfg.n},{k},{j},{r},{lft},{size},{source}")
    _emit(cfg, "counts.csv", _csv(COUNTS_HEADER, rows))
    if mode == "both" and formula != brute:
        diff = sorted(set(formula) ^ set(brute), key=str)
        raise FormulaBruteMismatch(f"formula and brute counts differ at {diff[0]}")
    return EXIT_OK


def cmd_gram(cfg: RunConfig) -> int:
    s = _structure(cfg, cfg.args.method)
    rows = reps.gram_rows(s, cfg.args.field, k=cfg.args.k)
    _emit(cfg, "gram.csv", _csv(reps.GRAM_HEADER, rows))
    return EXIT_OK


def cmd_gap(cfg: RunConfig) -> int:
    a = cfg.args
    report = reps.repgap(
        cfg.family,
        cfg.n,
        mode=a.mode,
        truncation=a.truncate,
        field=a.field,
        ratio_denominator=a.denominator,
        exclude_edges=a.exclude_edges,
        budget=cfg.budget,
        threads=cfg.threads,
    )
    _emit(cfg, "gap.csv", _csv(reps.GAP_HEADER, [report.csv_row()]))
    if cfg.out is not None:
        window = f"{report.window[0]}..{report.window[1]}" if report.window else "full"
        print(f"gap {report.gap} window {window} witnesses {';'.join(report.witnesses)}")
    return EXIT_OK


def _n_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --n-list {text!r}")
    if not values or min(values) < 1:
        raise UsageError("--n-list needs positive integers")
    return values


def cmd_bounds(cfg: RunConfig) -> int:
    rows = asymptotics.bounds_rows(_n_list(cfg.args.n_list))
    _emit(cfg, "bounds.csv", _csv(asymptotics.BOUNDS_HEADER, rows), per_family=False)
    return EXIT_OK


def cmd_figures(cfg: RunConfig) -> int:
    figures = cfg.args.figure or list(asymptotics.FIGURE_IDS)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(lambda f: asymptotics.figure_rows(f, cfg.args.n), figures))
    rows = [r for part in parts for r in part]
    _emit(cfg, "figure.csv", _csv(asymptotics.FIGURE_HEADER, rows), per_family=False)
    return EXIT_OK


# ---------------------------------------------------------------- selfcheck

def _check_sizes(nmax: int) -> str:
    for fam in Family:
        for n in range(1, nmax + 1):
            combinat.monoid_size(fam, n, mode="both")
    return f"formula = brute for all families, n <= {nmax}"


def _check_structures(nmax: int) -> str:
    for fam in Family:
        for n in range(1, nmax + 1):
            if combinat.monoid_size(fam, n) > 2000:
                continue
            table = enumerate_monoid(fam, n)
            s = green.green_structure(table)
            green.same_structure(s, green.sandwich_structure(table))
            green.check_structure(s)
    return f"cell theorems (i)-(v) and factorisation = brute, n <= {nmax}"


def _check_diagram_laws(nmax: int) -> str:
    rng = random.Random(0)
    for fam in (Family.RTL, Family.RMO, Family.RPRO, Family.MO):
        table = enumerate_monoid(fam, min(nmax, 2))
        els = table.elements
        one = identity(table.word)
        for _ in range(300):
            a, b, c = (rng.choice(els) for _ in range(3))
            if compose(compose(a, b), c) != compose(a, compose(b, c)):
                raise StructureMismatch("compose is not associative", (str(a), str(b), str(c)))
            if compose(one, a) != a or compose(a, one) != a:
                raise StructureMismatch("identity is not a unit", str(a))
            if flip(flip(a)) != a:
                raise StructureMismatch("flip is not an involution", str(a))
    return "associativity, unit and flip involution on random samples"


def _check_hypergeometric() -> str:
    rng = random.Random(1)
    agree = 0
    while agree < 300:
        m, b, c = rng.randint(0, 30), rng.randint(-40, 40), rng.randint(-40, 40)
        try:
            rhs = combinat.chu_vandermonde(m, b, c)
            lhs = combinat.hyp2f1_terminating(m, b, c)
        except RepGapError:
            continue
        if lhs != rhs:
            raise FormulaBruteMismatch(f"Chu-Vandermonde fails at m={m}, b={b}, c={c}")
        agree += 1
    return "Chu-Vandermonde on 300 admissible triples"


def _check_rmo_gram() -> str:
    s = reps.structure_for(Family.RMO, 3)
    ranks = sorted(int(r.split(",")[-2]) for r in reps.gram_rows(s, "q", k=2))
    if ranks != [4, 5, 5, 12]:
        raise FormulaBruteMismatch(f"rMo_3 k=2 ranks {ranks}")
    return "rMo_3 k=2 Gram ranks 4,5,5,12"


def _check_truncated_gap(tol: float) -> str:
    r = reps.repgap(Family.RTL, 8, mode="semisimple", truncation="paper")
    if r.gap != 21 or r.window != (6, 12):
        raise FormulaBruteMismatch(f"rTL_8 truncated gap {r.gap} on {r.window}")
    for n in (100, 500, 1000):
        exact = asymptotics.rtl_truncated_gap_log10(n)
        lo = asymptotics.eval_log10(asymptotics.bound(Family.RTL, "gap", "lower"), n)
        hi = asymptotics.eval_log10(asymptotics.bound(Family.RTL, "gap", "upper"), n)
        if not lo - tol <= exact <= hi + tol:
            raise FormulaBruteMismatch(f"rTL gap at n={n} outside its bounds")
    return "rTL_8 truncated gap 21 and rTL bound sandwich"


def _check_fault_injection() -> str:
    # flipping mirrors the arc letter rule, so every flipped diagram with an
    # arc must be rejected by the unmodified validator
    for d in enumerate_monoid(Family.RMO, 1).elements:
        check(flip(d), Family.RMO)
    return "mirrored arc rule accepted"


def cmd_selfcheck(cfg: RunConfig) -> int:
    nmax = 2 if cfg.args.quick else 3
    battery: list[tuple[str, Callable[[], str]]] = [
        ("sizes", lambda: _check_sizes(nmax)),
        ("structure", lambda: _check_structures(nmax)),
        ("diagram-laws", lambda: _check_diagram_laws(nmax)),
        ("chu-vandermonde", _check_hypergeometric),
    ]
    if not cfg.args.quick:
        battery += [("rmo-gram", _check_rmo_gram), ("truncated-gap", lambda: _check_truncated_gap(cfg.tolerance))]
    if cfg.args.inject_fault:
        battery.insert(0, ("fault-injection", _check_fault_injection))
    for name, fn in battery:
        t0 = time.perf_counter()
        try:
            detail = fn()
        except RepGapError as exc:
            print(f"FAIL {name}: {exc.reason}")
            return EXIT_ORACLE
        print(f"PASS {name}: {detail} ({time.perf_counter() - t0:.1f}s)")
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "enumerate": cmd_enumerate,
    "eggbox": cmd_eggbox,
    "counts": cmd_counts,
    "gram": cmd_gram,
    "gap": cmd_gap,
    "bounds": cmd_bounds,
    "figures": cmd_figures,
    "selfcheck": cmd_selfcheck,
}


def run(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = _config(argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RepGapError as exc:
        print(f"error: {exc.reason}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
