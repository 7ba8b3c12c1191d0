"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (also collected into
the pytest terminal summary).  Run directly with ``python tests/test_acceptance.py``
for the lines alone.
"""

from __future__ import annotations

import contextlib
import io
import math
import random
import time
from fractions import Fraction
from pathlib import Path

from repgap import asymptotics as asy
from repgap import combinat as cb
from repgap.cli import run
from repgap.diagram import sandwich_factor
from repgap.errors import HypothesisViolated, PoleError
from repgap.green import check_structure, green_structure
from repgap.monoids import enumerate_monoid
from repgap.reps import gram_matrix, repgap, simple_dims, structure_for

from acceptance_log import report
from oracles import BOTTOM_TABLE, alternating, context_block, count_bottom_configs


def _finish(number: int, problems: list[str], detail: str) -> None:
    report(number, not problems, detail if not problems else f"{detail}; {problems[0]}")
    assert not problems, problems


def test_criterion_01_rtl_sizes():
    t0 = time.perf_counter()
    sizes = [len(enumerate_monoid("rTL", n)) for n in range(1, 7)]
    elapsed = time.perf_counter() - t0
    expected = [cb.binomial(2 * n - 1, n) for n in range(1, 7)]
    problems = []
    if sizes != expected or sizes != [1, 3, 10, 35, 126, 462]:
        problems.append(f"sizes {sizes}")
    if elapsed >= 10:
        problems.append(f"took {elapsed:.1f}s")
    _finish(1, problems, f"|rTL_n| n=1..6 = {sizes} in {elapsed:.2f}s (< 10s)")


def test_criterion_02_rtl3_eggbox():
    s = green_structure(enumerate_monoid("rTL", 3))
    check_structure(s)
    cells = sorted((s.apex_labels[j][0], len(s.rows(j)), len(s.cols(j))) for j in range(len(s.j_cells)))
    problems = []
    if cells != [(2, 3, 1), (4, 3, 2), (6, 1, 1)]:
        problems.append(f"cells {cells}")
    if len(s.idempotent_j) != 3:
        problems.append("not all J-cells idempotent")
    if any(len(h) != 1 for h in s.h_cells):
        problems.append("non-trivial H-cell")
    shapes = ", ".join(f"{r}x{c} (k={k})" for k, r, c in cells)
    _finish(2, problems, f"rTL_3 J-cells {shapes}, all idempotent, H trivial")


def test_criterion_03_rmo_sizes_and_cells():
    t0 = time.perf_counter()
    problems = []
    sizes = []
    for n in (1, 2, 3):
        table = enumerate_monoid("rMo", n)
        formula = sum(
            cb.sequence_count(k, j)
            * cb.rmo_right_alternating(n, k, j)
            * cb.rmo_left_alternating(n, k, j)
            for k in range(2 * n + 1)
            for j in range(k // 2 + 1)
        )
        sizes.append(len(table))
        if len(table) != formula:
            problems.append(f"|rMo_{n}| {len(table)} != {formula}")
        bottoms: dict = {}
        for d in table.elements:
            bottoms.setdefault(d.alpha, set()).add(sandwich_factor(d)[2].key)
        for k in range(2 * n + 1):
            for j in range(k // 2 + 1):
                alt = cb.rmo_right_alternating(n, k, j)
                gam = cb.rmo_right_gamma(n, k, j)
                brute = {len(v) for a, v in bottoms.items() if len(a) == k and cb.count_12(a) == j}
                if alt != gam or brute - {alt} or (alt and not brute):
                    problems.append(f"(n,k,j)=({n},{k},{j}): alt {alt} gamma {gam} brute {brute}")
    if sizes[0] != 5:
        problems.append(f"|rMo_1| = {sizes[0]}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 120:
        problems.append(f"took {elapsed:.1f}s")
    _finish(3, problems, f"|rMo_n| n=1..3 = {sizes} = double sum; right cells alt = Gamma = brute ({elapsed:.2f}s)")


def test_criterion_04_rmo3_gram():
    s = structure_for("rMo", 3)
    mats = {s.apex_labels[j][1]: gram_matrix(s, j) for j in s.cells_at(2)}
    ranks = sorted(g.rank() for g in mats.values())
    ss = sorted(g.ssdim for g in mats.values())
    low = min(mats, key=lambda a: mats[a].rank())
    problems = []
    if ranks != [4, 5, 5, 12]:
        problems.append(f"ranks {ranks}")
    if ss != [5, 5, 5, 14]:
        problems.append(f"semisimple dims {ss}")
    if low != (2, 1):
        problems.append(f"minimum at {low}")
    _finish(4, problems, f"rMo_3 k=2 ranks {ranks}, ssdims {ss}, minimum at alpha={low}")


def test_criterion_05_rpro():
    problems = []
    sizes = []
    for n in range(1, 6):
        formula = sum(
            cb.binomial(k + 1, 2 * j + 1) * cb.binomial(n + j, k) ** 2
            for k in range(2 * n + 1)
            for j in range(k // 2 + 1)
        )
        size = len(enumerate_monoid("rpRo", n))
        sizes.append(size)
        if size != formula:
            problems.append(f"|rpRo_{n}| {size} != {formula}")
    if sizes[0] != 4:
        problems.append(f"|rpRo_1| = {sizes[0]}")
    for n in range(1, 5):
        s = structure_for("rpRo", n)
        for p in (None, 2, 3, 5):
            dims = simple_dims(s, p)
            for sd in dims.values():
                if not sd.rows == sd.cols == sd.dim:
                    problems.append(f"rpRo_{n} field {p}: {sd}")
            if sum(sd.dim ** 2 for sd in dims.values()) != len(s.table):
                problems.append(f"rpRo_{n} field {p}: sum of squares")
    _finish(5, problems, f"|rpRo_n| n=1..5 = {sizes}; Gram square and full rank over Q,F2,F3,F5; sum dim^2 = |M| for n<=4")


def test_criterion_06_rtl_full_rank():
    problems = []
    for n in range(1, 6):
        s = structure_for("rTL", n)
        for p in (None, 2, 3):
            for sd in simple_dims(s, p).values():
                if sd.dim != sd.ssdim:
                    problems.append(f"rTL_{n} k={sd.k} field {p}: rank {sd.dim} < {sd.ssdim}")
            if n >= 3 and repgap("rTL", n, mode="exact", field=p, structure=s).gap != repgap("rTL", n).gap:
                problems.append(f"rTL_{n} field {p}: exact gap differs")
    _finish(6, problems, "rTL Gram matrices full rank for n<=5 over Q,F2,F3; exact gap = semisimple gap")


def test_criterion_07_chu_vandermonde():
    rng = random.Random(2024)
    problems = []
    agreed = 0
    while agreed < 1000:
        m, b, c = rng.randint(0, 30), rng.randint(-40, 40), rng.randint(-40, 40)
        try:
            rhs = cb.chu_vandermonde(m, b, c)
            lhs = cb.hyp2f1_terminating(m, b, c)
        except (PoleError, HypothesisViolated):
            continue
        if lhs != rhs:
            problems.append(f"(m,b,c)=({m},{b},{c})")
        agreed += 1
    wz = 0
    while wz < 100:
        m, k = rng.randint(1, 20), rng.randint(0, 20)
        b = Fraction(rng.randint(-80, 80), rng.choice((1, 3, 7)))
        c = Fraction(rng.randint(-80, 80), rng.choice((3, 5, 7)))
        # generic parameters keep every Pochhammer factor nonzero
        if c.denominator == 1 or (c - b).denominator == 1:
            continue
        if cb.wz_certificate_residual(m, k, b, c) != 0:
            problems.append(f"WZ residual at (m,k,b,c)=({m},{k},{b},{c})")
        wz += 1
    _finish(7, problems, f"terminating sum = Pochhammer ratio on {agreed} triples; WZ identity exact on {wz} samples")


def test_criterion_08_catalan_blocks():
    problems = []
    for kfold in range(1, 7):
        row = [1] + [0] * 12
        for _ in range(kfold):
            row = [sum(row[i] * cb.catalan(n - i) for i in range(n + 1)) for n in range(13)]
        if [cb.catalan_convolution(kfold, n) for n in range(13)] != row:
            problems.append(f"convolution kfold={kfold}")
    for m in range(9):
        if count_bottom_configs(alternating(1, m)) != cb.catalan((m + 1) // 2):
            problems.append(f"A_{m}^0")
    for case, start, parity, formula in BOTTOM_TABLE:
        for j in range(parity, 9, 2):
            block = context_block(case, j)
            if block != alternating(start, j) or count_bottom_configs(block) != formula(j):
                problems.append(f"table row {case} at j={j}")
    _finish(8, problems, "Catalan convolution (kfold<=6, n<=12), A_m^0 (m<=8) and all 8 block-table rows (j<=8) match brute force")


def test_criterion_09_truncation_and_pivotal_sizes():
    r = repgap("rTL", 8, mode="semisimple", truncation="paper")
    problems = []
    if r.gap != 21 or r.window != (6, 12):
        problems.append(f"gap {r.gap} window {r.window}")
    if asy.truncation_window("rTL", 8) != [6, 8, 10, 12]:
        problems.append("window ks")
    pivotal = {"TL": (2, 14), "Mo": (1, 9), "pRo": (1, 6)}
    got = {}
    for fam, (n, expected) in pivotal.items():
        got[fam] = cb.monoid_size(fam, n, mode="both")
        if got[fam] != expected:
            problems.append(f"|{fam}_{n}| = {got[fam]}")
    _finish(9, problems, f"Gap_ss(rTL_8^T) = {r.gap} on k in {{6,8,10,12}}; |TL|,|Mo|,|pRo| = {got['TL']},{got['Mo']},{got['pRo']}")


def test_criterion_10_asymptotic_sandwich():
    problems = []
    worst = 0.0
    for fam, fn in (("rTL", asy.rtl_truncated_gap_log10), ("rpRo", asy.rpro_truncated_gap_log10)):
        for n in (100, 500, 1000):
            t0 = time.perf_counter()
            exact = fn(n)
            lo = asy.eval_log10(asy.bound(fam, "gap", "lower"), n)
            hi = asy.eval_log10(asy.bound(fam, "gap", "upper"), n)
            elapsed = time.perf_counter() - t0
            slack = max(lo - exact, exact - hi)
            worst = max(worst, slack)
            if slack > asy.LOG10_TOLERANCE:
                problems.append(f"{fam} n={n}: {exact:.3f} not in [{lo:.3f}, {hi:.3f}]")
            if elapsed >= 1:
                problems.append(f"{fam} n={n} took {elapsed:.2f}s")
    t0 = time.perf_counter()
    series: dict = {}
    for row in asy.figure_rows("intro_gap"):
        _, name, n, value = row.split(",")
        series.setdefault(name, {})[int(n)] = float(value)
    if time.perf_counter() - t0 >= 1:
        problems.append("intro table slower than 1s")
    gap = {n: series["TL_gap_lower"][n] - series["rTL_gap_upper"][n] for n in series["TL_gap_lower"]}
    ns = sorted(gap)
    if not all(gap[n] > 0 for n in ns):
        problems.append("TL and rTL curves do not separate")
    slopes = [(gap[b] - gap[a]) / (b - a) for a, b in zip(ns, ns[1:]) if a >= 100]
    if any(abs(s - math.log10(2)) > 0.01 for s in slopes):
        problems.append("separation rate differs from log10 2")
    _finish(10, problems, f"rTL/rpRo exact gaps within bounds (worst excess {worst:+.3f} <= 0.1); TL-rTL separation slope ~ log10 2")


def _outputs(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*.csv"))}


def test_criterion_11_determinism(tmp_path):
    runs = {}
    for threads in (1, 8):
        out = tmp_path / f"t{threads}"
        for argv in (
            ["figures"],
            ["gap", "--family", "rMo", "--n", "3", "--mode", "exact"],
            ["gap", "--family", "rTL", "--n", "8", "--mode", "semisimple", "--truncate", "paper"],
            ["gap", "--family", "TL", "--n", "4", "--mode", "exact", "--field", "3"],
        ):
            with contextlib.redirect_stdout(io.StringIO()):
                code = run(argv + ["--threads", str(threads), "--out", str(out)])
            assert code == 0
        runs[threads] = _outputs(out)
    problems = []
    if runs[1] != runs[8]:
        diff = sorted(k for k in runs[1].keys() | runs[8].keys() if runs[1].get(k) != runs[8].get(k))
        problems.append(f"differs: {diff}")
    if any(b"\r" in data for data in runs[1].values()):
        problems.append("CRLF in output")
    _finish(11, problems, f"figures and gap CSV byte-identical for --threads 1 and 8 ({len(runs[1])} files)")


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_"):
            continue
        try:
            if name.endswith("determinism"):
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
