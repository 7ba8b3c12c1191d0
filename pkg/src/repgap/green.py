"""Green's relations, J-order and eggbox layouts of an enumerated monoid.

Conventions: ``a * c`` is ``a`` stacked over ``c``.  ``a <=_r b`` iff
``b = a c`` for some ``c`` (so ``b`` lies in ``aM``), ``a <=_l b`` iff
``b = c a``, and ``a <=_lr b`` iff ``b = c a d``.  The identity therefore sits
in the minimal J-cell and the cell with the fewest through strands is the
unique maximal one.  In the eggbox, rows are right cells and columns are left
cells.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .diagram import Diagram, Family, compose, sandwich_factor
from .errors import BudgetExceeded, StructureMismatch
from .monoids import TABLE_LIMIT, MonoidTable

Apex = tuple[int, tuple[int, ...]]


@dataclass(eq=False)
class GreenStructure:
    table: MonoidTable = field(repr=False)
    method: str
    left_of: tuple[int, ...] = field(repr=False)
    right_of: tuple[int, ...] = field(repr=False)
    j_of: tuple[int, ...] = field(repr=False)
    left_cells: tuple[tuple[int, ...], ...] = field(repr=False)
    right_cells: tuple[tuple[int, ...], ...] = field(repr=False)
    j_cells: tuple[tuple[int, ...], ...]
    h_cells: tuple[tuple[int, ...], ...] = field(repr=False)
    # reach[x] has bit y set iff J-cell x <=_lr J-cell y
    reach: tuple[int, ...] = field(repr=False)
    j_order: frozenset[tuple[int, int]]
    idempotents: frozenset[int] = field(repr=False)
    idempotent_j: frozenset[int]
    apex_labels: tuple[Apex, ...]
    bottom_cell: int
    top_cell: int

    @property
    def family(self) -> Family:
        return self.table.family

    @property
    def n(self) -> int:
        return self.table.n

    def leq(self, x: int, y: int) -> bool:
        return bool(self.reach[x] >> y & 1)

    def rows(self, j: int) -> list[int]:
        """Right cells inside J-cell ``j`` (eggbox rows), ordered by first element."""
        return sorted({self.right_of[e] for e in self.j_cells[j]}, key=lambda r: self.right_cells[r][0])

    def cols(self, j: int) -> list[int]:
        return sorted({self.left_of[e] for e in self.j_cells[j]}, key=lambda c: self.left_cells[c][0])

    def element_at(self, r: int, c: int) -> int | None:
        common = set(self.right_cells[r]) & set(self.left_cells[c])
        return min(common) if common else None

    def cells_at(self, k: int) -> list[int]:
        return [j for j, (kk, _) in enumerate(self.apex_labels) if kk == k]


# ---------------------------------------------------------------- helpers

def _apex(d: Diagram) -> Apex:
    return d.k, d.alpha


def _group(keys: Iterable) -> tuple[list[int], list[tuple[int, ...]]]:
    """Partition indices by key; classes numbered by first occurrence."""
    ids: dict = {}
    members: list[list[int]] = []
    of: list[int] = []
    for i, key in enumerate(keys):
        c = ids.get(key)
        if c is None:
            c = ids[key] = len(members)
            members.append([])
        members[c].append(i)
        of.append(c)
    return of, [tuple(m) for m in members]


def _renumber_j(
    j_of: list[int], j_cells: list[tuple[int, ...]], elements: list[Diagram]
) -> tuple[list[int], list[tuple[int, ...]], list[int]]:
    """Order J-cells by (k, alpha, first element); returns new ids and the map old->new."""
    order = sorted(range(len(j_cells)), key=lambda j: (_apex(elements[j_cells[j][0]]), j_cells[j][0]))
    new_id = [0] * len(j_cells)
    for new, old in enumerate(order):
        new_id[old] = new
    return [new_id[j] for j in j_of], [j_cells[old] for old in order], new_id


def _row_keys(M: np.ndarray) -> list[bytes]:
    packed = np.packbits(M, axis=1)
    return [packed[i].tobytes() for i in range(M.shape[0])]


def _transitive_reduction(reach: list[int]) -> frozenset[tuple[int, int]]:
    m = len(reach)
    edges = set()
    for x in range(m):
        above = reach[x] & ~(1 << x)
        for y in range(m):
            if not above >> y & 1:
                continue
            # y covers x unless some z strictly between
            between = above & ~(1 << y)
            covered = True
            z_bits = between
            while z_bits:
                z = (z_bits & -z_bits).bit_length() - 1
                z_bits &= z_bits - 1
                if reach[z] >> y & 1:
                    covered = False
                    break
            if covered:
                edges.add((x, y))
    return frozenset(edges)


def _finish(
    table: MonoidTable,
    method: str,
    left_of: list[int],
    left_cells: list[tuple[int, ...]],
    right_of: list[int],
    right_cells: list[tuple[int, ...]],
    j_of: list[int],
    j_cells: list[tuple[int, ...]],
    reach: list[int],
    idempotents: set[int],
) -> GreenStructure:
    els = table.elements
    h_of, h_cells = _group(zip(left_of, right_of))
    idem_j = frozenset(j_of[e] for e in idempotents)
    apex = tuple(_apex(els[c[0]]) for c in j_cells)
    bottom = j_of[table.identity_id]
    maximal = [x for x in range(len(j_cells)) if reach[x] == 1 << x]
    if len(maximal) != 1:
        raise StructureMismatch("no unique maximal J-cell", maximal)
    return GreenStructure(
        table=table,
        method=method,
        left_of=tuple(left_of),
        right_of=tuple(right_of),
        j_of=tuple(j_of),
        left_cells=tuple(left_cells),
        right_cells=tuple(right_cells),
        j_cells=tuple(j_cells),
        h_cells=tuple(h_cells),
        reach=tuple(reach),
        j_order=_transitive_reduction(reach),
        idempotents=frozenset(idempotents),
        idempotent_j=idem_j,
        apex_labels=apex,
        bottom_cell=bottom,
        top_cell=maximal[0],
    )


# ---------------------------------------------------------------- brute force

def green_structure(
    table: MonoidTable, threads: int | None = None, limit: int = TABLE_LIMIT
) -> GreenStructure:
    """Green's relations straight from the multiplication table."""
    N = len(table)
    if N > limit:
        raise BudgetExceeded(N, limit)
    P = table.products(threads=threads)
    rows = np.arange(N)[:, None]
    # right ideal aM is row a of P, left ideal Ma is column a
    Rm = np.zeros((N, N), dtype=bool)
    Rm[rows, P] = True
    Lm = np.zeros((N, N), dtype=bool)
    Lm[rows, P.T] = True

    right_of, right_cells = _group(_row_keys(Rm))
    left_of, left_cells = _group(_row_keys(Lm))

    # MaM is the union of xM over x in Ma, so it only depends on the left cell
    reps = [c[0] for c in left_cells]
    MaM = (Lm[reps].astype(np.float32) @ Rm.astype(np.float32)) > 0
    j_of_left, _ = _group(_row_keys(MaM))
    j_of = [j_of_left[left_of[e]] for e in range(N)]
    raw: dict[int, list[int]] = defaultdict(list)
    for e, j in enumerate(j_of):
        raw[j].append(e)
    j_of, j_cells, _ = _renumber_j(j_of, [tuple(raw[j]) for j in range(len(raw))], table.elements)

    # reach[x] collects the cells whose elements lie in M rep(x) M
    reach = []
    for cell in j_cells:
        ideal = MaM[left_of[cell[0]]]
        reach.append(sum(1 << y for y, other in enumerate(j_cells) if ideal[other[0]]))
    idempotents = {a for a in range(N) if P[a, a] == a}
    return _finish(table, "brute", left_of, left_cells, right_of, right_cells, j_of, j_cells, reach, idempotents)


# ---------------------------------------------------------------- via factorisation

def is_subsequence(short: tuple[int, ...], long: tuple[int, ...]) -> bool:
    it = iter(long)
    return all(x in it for x in short)


def apex_leq(family: Family, a: Apex, b: Apex) -> bool:
    """Predicted J-order on apex labels: ``a <=_lr b``."""
    if family.rigid and family is not Family.RTL:
        return is_subsequence(b[1], a[1])
    return b[0] <= a[0]


def apex_key(family: Family, d: Diagram):
    """The label whose fibres are the J-cells (k, or the through sequence)."""
    if family.rigid and family is not Family.RTL:
        return d.alpha
    return d.k


def sandwich_structure(table: MonoidTable) -> GreenStructure:
    """Cells read off the factorisation ``top half o 1_alpha o bottom half``.

    This encodes the structure theorems rather than testing them; it is cross
    checked against :func:`green_structure` for small sizes and used where
    the quadratic product table would be too large.
    """
    fam = table.family
    els = table.elements
    N = len(els)
    halves = [sandwich_factor(d) for d in els]
    right_of, right_cells = _group((t.key for t, _, _ in halves))
    left_of, left_cells = _group((b.key for _, _, b in halves))
    j_of, j_cells_raw = _group(apex_key(fam, d) for d in els)
    j_of, j_cells, _ = _renumber_j(j_of, j_cells_raw, els)
    apex = [_apex(els[c[0]]) for c in j_cells]
    m = len(j_cells)
    reach = [sum(1 << y for y in range(m) if apex_leq(fam, apex[x], apex[y])) for x in range(m)]
    idempotents = set()
    for e in range(N):
        t, alpha, b = halves[e]
        if compose(t, b).k == len(alpha):
            idempotents.add(e)
    del N
    return _finish(table, "sandwich", left_of, left_cells, right_of, right_cells, j_of, j_cells, reach, idempotents)


def same_structure(a: GreenStructure, b: GreenStructure) -> None:
    """Raise :class:`StructureMismatch` unless both describe identical cells and order."""
    for name in ("left_cells", "right_cells", "j_cells", "h_cells"):
        sa = {frozenset(c) for c in getattr(a, name)}
        sb = {frozenset(c) for c in getattr(b, name)}
        if sa != sb:
            witness = sorted(sa ^ sb, key=min)[0]
            raise StructureMismatch(f"{name} differ", sorted(witness))
    if a.reach != b.reach:
        raise StructureMismatch("J-orders differ")
    if a.idempotents != b.idempotents:
        raise StructureMismatch("idempotents differ", sorted(a.idempotents ^ b.idempotents)[:1])


# ---------------------------------------------------------------- checks

@dataclass
class StructureReport:
    family: Family
    n: int
    j_cells: int
    checks: list[str]
    order_both_directions: bool

    def __str__(self) -> str:
        return f"{self.family.value}_{self.n}: {self.j_cells} J-cells; " + ", ".join(self.checks)


def check_structure(s: GreenStructure) -> StructureReport:
    """Verify the structural cell theorems on a computed structure.

    (i) J-cells are the fibres of the apex label, (ii) right and left cells
    are the fibres of the top and bottom halves, (iii) every J-cell holds an
    idempotent, (iv) the J-order is the predicted order on labels, (v) all
    H-cells are singletons.
    """
    fam = s.family
    els = s.table.elements
    checks = []

    by_label = defaultdict(set)
    for e, d in enumerate(els):
        by_label[apex_key(fam, d)].add(s.j_of[e])
    for label, cells in by_label.items():
        if len(cells) != 1:
            raise StructureMismatch("(i) label spans several J-cells", (label, sorted(cells)))
    if len(by_label) != len(s.j_cells):
        raise StructureMismatch("(i) J-cells share a label")
    checks.append("(i) J-cells = label fibres")

    tops: dict[bytes, int] = {}
    bottoms: dict[bytes, int] = {}
    for e, d in enumerate(els):
        t, _, b = sandwich_factor(d)
        if tops.setdefault(t.key, s.right_of[e]) != s.right_of[e]:
            raise StructureMismatch("(ii) equal top halves in different right cells", (e, str(d)))
        if bottoms.setdefault(b.key, s.left_of[e]) != s.left_of[e]:
            raise StructureMismatch("(ii) equal bottom halves in different left cells", (e, str(d)))
    if len(tops) != len(s.right_cells) or len(bottoms) != len(s.left_cells):
        raise StructureMismatch("(ii) a right or left cell holds several halves")
    checks.append("(ii) R/L cells = top/bottom half fibres")

    missing = set(range(len(s.j_cells))) - set(s.idempotent_j)
    if missing:
        j = min(missing)
        raise StructureMismatch("(iii) J-cell without idempotent", s.apex_labels[j])
    checks.append("(iii) all J-cells idempotent")

    both = True
    for x, ax in enumerate(s.apex_labels):
        for y, ay in enumerate(s.apex_labels):
            if s.leq(x, y) != apex_leq(fam, ax, ay):
                raise StructureMismatch(
                    "(iv) J-order differs from the label order", (ax, ay, s.leq(x, y))
                )
    checks.append("(iv) J-order = " + ("subsequence order" if fam in (Family.RMO, Family.RPRO) else "order by k"))

    big = [h for h in s.h_cells if len(h) != 1]
    if big:
        raise StructureMismatch("(v) non-trivial H-cell", [str(els[e]) for e in big[0]])
    checks.append("(v) H-cells trivial")

    for j, cell in enumerate(s.j_cells):
        if len(cell) != len(s.rows(j)) * len(s.cols(j)):
            raise StructureMismatch("|J| != rows * cols", s.apex_labels[j])
    return StructureReport(fam, s.n, len(s.j_cells), checks, both)


# ---------------------------------------------------------------- rendering

def alpha_text(alpha: tuple[int, ...]) -> str:
    return " ".join(map(str, alpha))


def eggbox_render(s: GreenStructure, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return _render_ascii(s)
    if fmt == "dot":
        return _render_dot(s)
    raise ValueError(f"unknown eggbox format {fmt!r}")


def _render_ascii(s: GreenStructure) -> str:
    out = []
    for j in range(len(s.j_cells)):
        rows, cols = s.rows(j), s.cols(j)
        k, alpha = s.apex_labels[j]
        tag = []
        if j == s.top_cell:
            tag.append("top")
        if j == s.bottom_cell:
            tag.append("bottom")
        extra = f" ({', '.join(tag)})" if tag else ""
        out.append(f"J{j} k={k} alpha={alpha_text(alpha) or '-'} {len(rows)}x{len(cols)}{extra}")
        for r in rows:
            line = []
            for c in cols:
                e = s.element_at(r, c)
                line.append("[*]" if e is not None and e in s.idempotents else "[ ]")
            out.append("".join(line))
        out.append("")
    return "\n".join(out)


def _render_dot(s: GreenStructure) -> str:
    out = [f'digraph "{s.family.value}_{s.n}" {{', "  rankdir=BT;"]
    for j in range(len(s.j_cells)):
        k, alpha = s.apex_labels[j]
        out.append(f"  subgraph cluster_{j} {{")
        out.append(f'    label="k={k} alpha={alpha_text(alpha)}";')
        star = "*" if j in s.idempotent_j else ""
        out.append(
            f'    J{j} [shape=box, label="{len(s.rows(j))}x{len(s.cols(j))}{star}"];'
        )
        out.append("  }")
    for x, y in sorted(s.j_order):
        out.append(f"  J{x} -> J{y};")
    out.append("}")
    return "\n".join(out) + "\n"


GREEN_HEADER = "family,n,jcell_id,k,alpha,left_cells,right_cells,size,idempotent"


def green_rows(s: GreenStructure) -> list[str]:
    rows = []
    for j, cell in enumerate(s.j_cells):
        k, alpha = s.apex_labels[j]
        rows.append(
            f"{s.family.value},{s.n},{j},{k},{alpha_text(alpha)},"
            f"{len(s.cols(j))},{len(s.rows(j))},{len(cell)},{int(j in s.idempotent_j)}"
        )
    return rows
