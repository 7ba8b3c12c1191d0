"""The six endomorphism monoids and their exhaustive enumeration.

Rigid families live on the word ``(1 2)^n``, pivotal ones on ``2n`` copies
of the self-dual letter (written ``0``).  Elements are produced directly as
non-crossing, letter-compatible partial pairings of the boundary; closure
under composition is a test, not the construction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO, Iterable, Sequence

import numpy as np

from .diagram import Diagram, Family, Word, parse, serialize
from .errors import BudgetExceeded, ParseError

DEFAULT_BUDGET = 5_000_000
# product tables are quadratic; beyond this many elements refuse
TABLE_LIMIT = 6000

PIVOTAL_LETTER = 0


def family_word(family: Family | str, n: int) -> Word:
    fam = Family.parse(family)
    if n < 1:
        raise ValueError("n must be positive")
    if fam.rigid:
        return (1, 2) * n
    return (PIVOTAL_LETTER,) * (2 * n)


@dataclass
class MonoidTable:
    family: Family
    n: int
    elements: list[Diagram]
    index: dict[bytes, int] = field(repr=False)
    _products: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def word(self) -> Word:
        return family_word(self.family, self.n)

    @property
    def identity_id(self) -> int:
        from .diagram import identity

        return self.index[identity(self.word).key]

    def id_of(self, d: Diagram) -> int:
        return self.index[d.key]

    def partner_matrix(self) -> np.ndarray:
        return np.array([d.partner for d in self.elements], dtype=np.int16).reshape(
            len(self.elements), 2 * len(self.word)
        )

    def products(self, threads: int | None = None) -> np.ndarray:
        """``P[a, c]`` is the id of ``a * c`` (``a`` stacked over ``c``)."""
        if self._products is None:
            self._products = product_table(self, threads=threads)
        return self._products

    def mul(self, a: int, c: int) -> int:
        if self._products is not None:
            return int(self._products[a, c])
        from .diagram import compose

        return self.index[compose(self.elements[c], self.elements[a]).key]


# ---------------------------------------------------------------- enumeration

def _boundary(word: Word) -> list[tuple[str, int]]:
    """Cyclic boundary order: bottom left to right, then top right to left."""
    L = len(word)
    return [("b", i) for i in range(L)] + [("t", q) for q in reversed(range(L))]


def _pair_ok(fam: Family, word: Word, x: tuple[str, int], y: tuple[str, int]) -> bool:
    """``x`` precedes ``y`` in cyclic order."""
    if x[0] != y[0]:
        return word[x[1]] == word[y[1]]
    if not fam.allows_arcs:
        return False
    if fam.pivotal:
        return True
    if x[0] == "b":
        return word[x[1]] == word[y[1]] + 1
    # top points run right to left, so y is the left end of the arc
    return word[y[1]] + 1 == word[x[1]]


def _configurations(fam: Family, word: Word) -> list[tuple[tuple[int, int], ...]]:
    pts = _boundary(word)
    N = len(pts)
    ok = [[j > i and _pair_ok(fam, word, pts[i], pts[j]) for j in range(N)] for i in range(N)]
    dots = fam.allows_dots

    @lru_cache(maxsize=None)
    def gen(i: int, j: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        if i == j:
            return ((),)
        out: list[tuple[tuple[int, int], ...]] = []
        if dots:
            for rest in gen(i + 1, j):
                out.append(((i, i),) + rest)
        for m in range(i + 1, j):
            if not ok[i][m]:
                continue
            if not dots and (m - i - 1) % 2:
                continue
            inner = gen(i + 1, m)
            if not inner:
                continue
            outer = gen(m + 1, j)
            for a in inner:
                for b in outer:
                    out.append(((i, m),) + a + b)
        return tuple(out)

    result = list(gen(0, N))
    gen.cache_clear()
    return result


def _to_diagram(word: Word, pts: list[tuple[str, int]], conf) -> Diagram:
    L = len(word)

    def pid(c: int) -> int:
        side, i = pts[c]
        return i if side == "b" else L + i

    partner = [0] * (2 * L)
    for a, b in conf:
        if a == b:
            partner[pid(a)] = -1
        else:
            pa, pb = pid(a), pid(b)
            partner[pa] = pb
            partner[pb] = pa
    return Diagram(word, word, tuple(partner))


def enumerate_monoid(
    family: Family | str, n: int, budget: int = DEFAULT_BUDGET
) -> MonoidTable:
    """All valid endomorphism diagrams, sorted by canonical key."""
    from .combinat import monoid_size

    fam = Family.parse(family)
    predicted = monoid_size(fam, n, mode="formula")
    if predicted > budget:
        raise BudgetExceeded(predicted, budget)
    word = family_word(fam, n)
    pts = _boundary(word)
    elements = sorted(_to_diagram(word, pts, c) for c in _configurations(fam, word))
    return _table(fam, n, elements)


def _table(fam: Family, n: int, elements: list[Diagram]) -> MonoidTable:
    index = {d.key: i for i, d in enumerate(elements)}
    if len(index) != len(elements):
        raise ValueError("duplicate elements")
    return MonoidTable(fam, n, elements, index)


# ---------------------------------------------------------------- export

def export_elements(table: MonoidTable, sink: IO[str]) -> int:
    sink.write(f"# family={table.family.value} n={table.n} count={len(table)}\n")
    for d in table.elements:
        sink.write(serialize(d))
    return len(table)


def import_elements(source: Iterable[str]) -> MonoidTable:
    lines = iter(source)
    header = next(lines, "")
    if not header.startswith("# "):
        raise ParseError("missing header line", 0)
    fields = dict(part.split("=", 1) for part in header[2:].split())
    fam = Family.parse(fields["family"])
    n = int(fields["n"])
    count = int(fields["count"])
    elements = [parse(line, fam) for line in lines if line.strip()]
    if len(elements) != count:
        raise ParseError(f"header announces {count} elements, found {len(elements)}", 0)
    return _table(fam, n, sorted(elements))


# ---------------------------------------------------------------- products

def batch_compose(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Vectorised :func:`repgap.diagram.compose` for endomorphism partner rows.

    ``lower`` and ``upper`` are ``(Q, 2L)`` arrays with ``-1`` for dots.  Only
    the walks still in progress are carried from one step to the next.
    """
    Q, twoL = lower.shape
    L = twoL // 2
    lowerf = np.ascontiguousarray(lower, dtype=np.int64).ravel()
    upperf = np.ascontiguousarray(upper, dtype=np.int64).ravel()
    start = np.empty((Q, twoL), dtype=np.int64)
    start[:, :L] = lower[:, :L]
    start[:, L:] = upper[:, L:]
    cur = start.ravel()
    idx = np.arange(Q * twoL, dtype=np.int64)
    base = (idx // twoL) * twoL
    in_lower = (idx % twoL) < L
    result = np.empty(Q * twoL, dtype=np.int64)
    for _ in range(twoL + 2):
        if idx.size == 0:
            break
        done = (cur == -1) | (in_lower & (cur < L)) | (~in_lower & (cur >= L))
        result[idx[done]] = cur[done]
        keep = ~done
        idx, cur, base, in_lower = idx[keep], cur[keep], base[keep], in_lower[keep]
        nxt = np.where(in_lower, upperf[base + np.where(in_lower, cur - L, 0)],
                       lowerf[base + np.where(in_lower, 0, cur + L)])
        cur = nxt
        in_lower = ~in_lower
    if idx.size:  # pragma: no cover - bounded by L crossings
        raise RuntimeError("composition walk did not terminate")
    return result.reshape(Q, twoL)


def _codes(partners: np.ndarray) -> np.ndarray:
    """Injective uint64 code of partner rows (dot written as a self loop)."""
    Q, twoL = partners.shape
    own = np.arange(twoL, dtype=np.int64)[None, :]
    vals = np.where(partners < 0, own, partners).astype(np.uint64)
    code = np.zeros(Q, dtype=np.uint64)
    base = np.uint64(twoL)
    for col in range(twoL):
        code = code * base + vals[:, col]
    return code


def product_table(
    table: MonoidTable, threads: int | None = None, limit: int = TABLE_LIMIT
) -> np.ndarray:
    N = len(table)
    if N > limit:
        raise BudgetExceeded(N * N, limit * limit)
    L = len(table.word)
    P = table.partner_matrix().astype(np.int64)
    if 2 * L * max(1, (2 * L - 1).bit_length()) > 64:
        return _product_table_slow(table)
    codes = _codes(P)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    out = np.empty((N, N), dtype=np.int32)
    chunk = max(1, 200_000 // max(N, 1))

    def work(a0: int) -> None:
        a1 = min(N, a0 + chunk)
        B = a1 - a0
        upper = np.repeat(P[a0:a1], N, axis=0)
        lower = np.tile(P, (B, 1))
        res = batch_compose(lower, upper)
        rc = _codes(res)
        pos = np.searchsorted(sorted_codes, rc)
        pos = np.minimum(pos, N - 1)
        if not np.array_equal(sorted_codes[pos], rc):
            bad = int(np.flatnonzero(sorted_codes[pos] != rc)[0])
            raise ValueError(
                f"product of elements {a0 + bad // N} and {bad % N} is not in the table"
            )
        out[a0:a1] = order[pos].reshape(B, N)

    starts = range(0, N, chunk)
    workers = threads or int(os.environ.get("REPGAP_THREADS", "1") or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    else:
        for a0 in starts:
            work(a0)
    return out


def _product_table_slow(table: MonoidTable) -> np.ndarray:
    from .diagram import compose

    N = len(table)
    out = np.empty((N, N), dtype=np.int32)
    for a, x in enumerate(table.elements):
        for c, y in enumerate(table.elements):
            out[a, c] = table.index[compose(y, x).key]
    return out


def closure_from(generators: Sequence[Diagram]) -> set[bytes]:
    """Keys of the submonoid generated by ``generators`` (test oracle)."""
    from .diagram import compose, identity

    if not generators:
        return set()
    start = identity(generators[0].bottom)
    seen = {start.key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = compose(x, g)
                if y.key not in seen:
                    seen[y.key] = y
                    nxt.append(y)
        frontier = nxt
    return set(seen)
