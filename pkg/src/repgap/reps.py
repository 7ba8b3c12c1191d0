"""Cell modules, Gram matrices, exact ranks and representation gaps.

Gram matrices have rows indexed by the top halves of a J-cell (its right
cells) and columns by the bottom halves (its left cells).  The entry is 1 when
stacking the bottom half over the top half keeps all ``k`` through strands.
Its rank over a field is the dimension of the simple module at that apex;
the column count, which is the size of a right cell, is the semisimple
dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import combinat
from .diagram import Diagram, Family, compose, sandwich_factor
from .errors import BadParameters, EmptyWindow, NotPrime, StructureMismatch
from .green import GreenStructure, alpha_text, green_structure, sandwich_structure
from .monoids import DEFAULT_BUDGET, enumerate_monoid

# structures above this many elements are built from the factorisation
BRUTE_STRUCTURE_LIMIT = 1000


# ---------------------------------------------------------------- fields and ranks

def parse_field(spec: str | int | None) -> int | None:
    """``None``/``"q"`` for the rationals, otherwise a prime."""
    if spec is None:
        return None
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s in ("q", "qq", "rationals", "0"):
            return None
        if not s.isdigit():
            raise BadParameters(f"unknown field {spec!r}")
        spec = int(s)
    p = int(spec)
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise NotPrime(f"{p} is not prime")
    return p


def field_name(p: int | None) -> str:
    return "q" if p is None else str(p)


def rank(matrix: Sequence[Sequence[int]], field: str | int | None = None) -> int:
    p = parse_field(field)
    rows = [list(map(int, r)) for r in matrix]
    if not rows or not rows[0]:
        return 0
    return _rank_bareiss(rows) if p is None else _rank_mod(rows, p)


def _rank_bareiss(a: list[list[int]]) -> int:
    """Fraction-free elimination; every division below is exact."""
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            for j in range(c + 1, n):
                row[j] = (pr[c] * row[j] - f * pr[j]) // prev
            row[c] = 0
        prev = pr[c]
        r += 1
        if r == m:
            break
    return r


def _rank_mod(a: list[list[int]], p: int) -> int:
    m, n = len(a), len(a[0])
    a = [[x % p for x in row] for row in a]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        pr = [x * inv % p for x in a[r]]
        a[r] = pr
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], pr)]
        r += 1
        if r == m:
            break
    return r


# ---------------------------------------------------------------- structures

def structure_for(
    family: Family | str,
    n: int,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    threads: int | None = None,
) -> GreenStructure:
    table = enumerate_monoid(family, n, budget=budget)
    if method == "auto":
        method = "brute" if len(table) <= BRUTE_STRUCTURE_LIMIT else "sandwich"
    if method == "brute":
        return green_structure(table, threads=threads)
    if method == "sandwich":
        return sandwich_structure(table)
    raise BadParameters(f"unknown structure method {method!r}")


# ---------------------------------------------------------------- cell modules

@dataclass
class CellModule:
    structure: GreenStructure = field(repr=False)
    cell: int
    side: str
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def action(self, a: int) -> np.ndarray:
        """Matrix of ``a``; ``action(a) @ action(b) == action(a * b)`` on both sides.

        Left modules act on column vectors (``a . l``); right modules act on
        row vectors (``r . a``), so their matrices are transposed.
        """
        P = self.structure.table.products()
        pos = {e: i for i, e in enumerate(self.basis)}
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j, e in enumerate(self.basis):
            if self.side == "left":
                i = pos.get(int(P[a, e]))
                if i is not None:
                    M[i, j] = 1
            else:
                i = pos.get(int(P[e, a]))
                if i is not None:
                    M[j, i] = 1
        return M

    def check_homomorphism(self) -> tuple[int, int] | None:
        """First pair ``(a, b)`` breaking multiplicativity, or ``None``."""
        P = self.structure.table.products()
        N = len(self.structure.table)
        mats = [self.action(a) for a in range(N)]
        for a in range(N):
            for b in range(N):
                if not np.array_equal(mats[a] @ mats[b], mats[int(P[a, b])]):
                    return a, b
        return None


def cell_module(structure: GreenStructure, cell: int, side: str) -> CellModule:
    if side == "left":
        basis = structure.left_cells[cell]
    elif side == "right":
        basis = structure.right_cells[cell]
    else:
        raise BadParameters(f"side must be left or right, not {side!r}")
    return CellModule(structure, cell, side, tuple(basis))


# ---------------------------------------------------------------- Gram matrices

@dataclass
class GramMatrix:
    jcell: int
    k: int
    alpha: tuple[int, ...]
    tops: tuple[Diagram, ...] = field(repr=False)
    bottoms: tuple[Diagram, ...] = field(repr=False)
    entries: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.tops), len(self.bottoms)

    @property
    def ssdim(self) -> int:
        return len(self.bottoms)

    def rank(self, field: str | int | None = None) -> int:
        return rank(self.entries, field)


def gram_from_halves(tops: Sequence[Diagram], bottoms: Sequence[Diagram], k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(int(compose(t, b).k == k) for b in bottoms)
        for t in tops
    )


def gram_matrix(structure: GreenStructure, j: int) -> GramMatrix:
    els = structure.table.elements
    k, alpha = structure.apex_labels[j]
    tops = tuple(sandwich_factor(els[structure.right_cells[r][0]])[0] for r in structure.rows(j))
    bottoms = tuple(sandwich_factor(els[structure.left_cells[c][0]])[2] for c in structure.cols(j))
    return GramMatrix(j, k, alpha, tops, bottoms, gram_from_halves(tops, bottoms, k))


@dataclass(frozen=True)
class SimpleDim:
    jcell: int
    k: int
    alpha: tuple[int, ...]
    dim: int
    ssdim: int
    rows: int
    cols: int


def simple_dims(structure: GreenStructure, field: str | int | None = None) -> dict[int, SimpleDim]:
    missing = set(range(len(structure.j_cells))) - set(structure.idempotent_j)
    if missing:
        raise StructureMismatch("J-cell without idempotent", structure.apex_labels[min(missing)])
    out = {}
    for j in range(len(structure.j_cells)):
        g = gram_matrix(structure, j)
        r, c = g.shape
        out[j] = SimpleDim(j, g.k, g.alpha, g.rank(field), g.ssdim, r, c)
    return out


GRAM_HEADER = "family,n,k,alpha,rows,cols,field,rank,ssdim"


def gram_rows(structure: GreenStructure, field: str | int | None = None, k: int | None = None) -> list[str]:
    p = parse_field(field)
    rows = []
    for j in range(len(structure.j_cells)):
        if k is not None and structure.apex_labels[j][0] != k:
            continue
        g = gram_matrix(structure, j)
        r, c = g.shape
        rows.append(
            f"{structure.family.value},{structure.n},{g.k},{alpha_text(g.alpha)},"
            f"{r},{c},{field_name(p)},{g.rank(p)},{g.ssdim}"
        )
    return rows


# ---------------------------------------------------------------- truncation

def _floor_shift_sqrt(x: Fraction, D: int, sign: int) -> int:
    """``floor(x + sign * sqrt(D))`` exactly."""
    m = math.floor(float(x) + sign * math.sqrt(D))
    # adjust the float guess: m is right when m <= value < m + 1
    def le(t: int) -> bool:
        # t <= x + sign*sqrt(D)  <=>  sign*(t - x) <= sqrt(D) for sign=+1
        d = Fraction(t) - x
        if sign > 0:
            return d <= 0 or d * d <= D
        return d <= 0 and d * d >= D

    while not le(m):
        m -= 1
    while le(m + 1):
        m += 1
    return m


def _ceil_shift_sqrt(x: Fraction, D: int, sign: int) -> int:
    """``ceil(x + sign * sqrt(D))`` exactly."""
    return -_floor_shift_sqrt(-x, D, -sign)


def feasible_ks(family: Family | str, n: int) -> list[int]:
    fam = Family.parse(family)
    if fam is Family.RTL:
        return list(range(2, 2 * n + 1, 2))
    if fam is Family.TL:
        return list(range(0, 2 * n + 1, 2))
    return list(range(0, 2 * n + 1))


def window_bounds(family: Family | str, n: int) -> tuple[int, int]:
    """Real window rounded inward, before intersecting with the feasible k."""
    fam = Family.parse(family)
    if n < 1:
        raise BadParameters("n must be positive")
    D = 2 * n
    if fam in (Family.TL, Family.MO, Family.RMO):
        return 0, _floor_shift_sqrt(Fraction(0), 4 * D, +1)
    centre = {
        Family.PRO: Fraction(n),
        Family.RTL: Fraction(n + 1),
        Family.RPRO: Fraction(n, 2),
    }[fam]
    return _ceil_shift_sqrt(centre, D, -1), _floor_shift_sqrt(centre, D, +1)


def truncation_window(family: Family | str, n: int) -> list[int]:
    lo, hi = window_bounds(family, n)
    ks = [k for k in feasible_ks(family, n) if lo <= k <= hi]
    if not ks:
        raise EmptyWindow(f"no feasible k in [{lo}, {hi}] for {Family.parse(family).value}_{n}")
    return ks


# ---------------------------------------------------------------- apex tables

@dataclass(frozen=True)
class ApexDim:
    """One apex (exact mode) or one apex class (semisimple mode)."""

    k: int
    label: str
    dim: int
    ssdim: int
    # J-cells represented and their total number of elements
    cells: int
    size: int
    sort_key: tuple = field(repr=False, compare=False)


def _class_label(fam: Family, k: int, j: int | None) -> str:
    if j is None:
        return f"k={k}"
    return f"k={k} j={j}"


def semisimple_apexes(family: Family | str, n: int) -> list[ApexDim]:
    """Closed-form semisimple dimensions per apex class (no enumeration)."""
    fam = Family.parse(family)
    out = []
    if fam is Family.RTL:
        for k in feasible_ks(fam, n):
            r = combinat.cell_count(fam, n, k, None, "right")
            lft = combinat.cell_count(fam, n, k, None, "left")
            out.append(ApexDim(k, _class_label(fam, k, None), r, r, 1, r * lft, (k,)))
    elif fam in (Family.RMO, Family.RPRO):
        for k in range(2 * n + 1):
            for j in range(k // 2 + 1):
                r = combinat.cell_count(fam, n, k, j, "right")
                if r == 0:
                    continue
                lft = combinat.cell_count(fam, n, k, j, "left")
                cnt = combinat.sequence_count(k, j)
                out.append(ApexDim(k, _class_label(fam, k, j), r, r, cnt, cnt * r * lft, (k, j)))
    else:
        halves = combinat.pivotal_half_counts(fam, 2 * n)
        for k in feasible_ks(fam, n):
            h = halves[k]
            out.append(ApexDim(k, _class_label(fam, k, None), h, h, 1, h * h, (k,)))
    return out


def exact_apexes(structure: GreenStructure, field: str | int | None = None) -> list[ApexDim]:
    dims = simple_dims(structure, field)
    out = []
    for j, sd in dims.items():
        label = f"k={sd.k} alpha={alpha_text(sd.alpha) or '-'}"
        size = len(structure.j_cells[j])
        out.append(ApexDim(sd.k, label, sd.dim, sd.ssdim, 1, size, (sd.k, sd.alpha)))
    return out


# ---------------------------------------------------------------- gaps

@dataclass
class GapReport:
    family: Family
    n: int
    mode: str
    field: str
    window: tuple[int, int] | None
    apexes: list[ApexDim]
    counted: list[ApexDim]
    gap: int
    witnesses: list[str]
    denominator: int
    denominator_mode: str

    @property
    def log10_gap(self) -> float:
        return math.log10(self.gap)

    @property
    def log10_ratio(self) -> float:
        return self.log10_gap - 0.5 * math.log10(self.denominator)

    @property
    def ratio(self) -> float:
        return 10.0 ** self.log10_ratio

    def csv_row(self) -> str:
        lo, hi = self.window if self.window else ("", "")
        return (
            f"{self.family.value},{self.n},{self.mode},{self.field},{lo},{hi},{self.gap},"
            f"{self.log10_gap:.6f},{self.denominator_mode},{self.log10_ratio:.6f},"
            f"{';'.join(self.witnesses)}"
        )


GAP_HEADER = (
    "family,n,mode,field,window_lo,window_hi,gap,log10_gap,"
    "denominator_mode,log10_ratio,witness_apexes"
)


def _truncated_size(fam: Family, n: int, apexes: list[ApexDim], ks: list[int]) -> int:
    """Elements of the Rees factor on the window, with adjoined zero and unit."""
    feas = feasible_ks(fam, n)
    size = sum(a.size for a in apexes if a.k in ks)
    if min(feas) < min(ks):
        size += 1  # the collapsed ideal below the window
    if max(ks) < max(feas):
        size += 1  # adjoined unit
    return size


def repgap(
    family: Family | str,
    n: int,
    mode: str = "semisimple",
    truncation: str = "full",
    field: str | int | None = None,
    ratio_denominator: str = "full",
    exclude_edges: bool = False,
    budget: int = DEFAULT_BUDGET,
    structure: GreenStructure | None = None,
    threads: int | None = None,
) -> GapReport:
    """Smallest counted simple dimension and its ratio to ``sqrt(|M|)``.

    Full monoids skip the top and bottom J-cells.  Truncated monoids count
    every retained apex unless ``exclude_edges`` drops the two extreme k.
    """
    fam = Family.parse(family)
    p = parse_field(field)
    if mode not in ("exact", "semisimple"):
        raise BadParameters(f"unknown mode {mode!r}")
    if truncation not in ("full", "paper"):
        raise BadParameters(f"unknown truncation {truncation!r}")
    if ratio_denominator not in ("full", "truncated"):
        raise BadParameters(f"unknown ratio denominator {ratio_denominator!r}")

    if mode == "semisimple":
        apexes = semisimple_apexes(fam, n)
    else:
        if structure is None:
            structure = structure_for(fam, n, budget=budget, threads=threads)
        apexes = exact_apexes(structure, p)

    feas = feasible_ks(fam, n)
    full_size = combinat.monoid_size(fam, n)
    window = None
    if truncation == "full":
        counted = [a for a in apexes if a.k not in (min(feas), max(feas))]
        denominator = full_size
    else:
        ks = truncation_window(fam, n)
        window = (min(ks), max(ks))
        counted = [a for a in apexes if a.k in ks]
        if exclude_edges:
            counted = [a for a in counted if a.k not in window]
        denominator = full_size if ratio_denominator == "full" else _truncated_size(fam, n, apexes, ks)
    counted = [a for a in counted if a.dim > 0]
    if not counted:
        raise EmptyWindow(f"no nontrivial apex left for {fam.value}_{n}")
    gap = min(a.dim for a in counted)
    witnesses = [a.label for a in sorted(counted, key=lambda a: a.sort_key) if a.dim == gap]
    return GapReport(
        family=fam,
        n=n,
        mode=mode,
        field=field_name(p),
        window=window,
        apexes=sorted(apexes, key=lambda a: a.sort_key),
        counted=sorted(counted, key=lambda a: a.sort_key),
        gap=gap,
        witnesses=witnesses,
        denominator=denominator,
        denominator_mode=ratio_denominator if truncation == "paper" else "full",
    )
