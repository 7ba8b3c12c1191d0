"""Planar diagrams between boundary words.

A diagram from a bottom word to a top word is stored as a ``partner`` tuple
over its boundary points: bottom position ``i`` (0-based) is point ``i``,
top position ``q`` is point ``len(bottom) + q``.  ``partner[p]`` is the point
joined to ``p``, or ``-1`` when ``p`` carries a dot.  Everything user facing
(pair sets, the text format) is 1-based.

Arc letter rules follow the drawn pictures: a bottom arc joins letter ``x``
to a later ``x - 1``; a top arc joins ``x`` to a later ``x + 1``.  In the
pivotal families every letter is the self-dual ``0`` and any two boundary
points may be joined.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    BoundaryMismatch,
    CrossingPairs,
    DiagramError,
    FamilyViolation,
    LetterMismatch,
    NotEndomorphism,
    ParseError,
    UncoveredPosition,
)

Word = tuple[int, ...]


class Family(str, enum.Enum):
    TL = "TL"
    MO = "Mo"
    PRO = "pRo"
    RTL = "rTL"
    RMO = "rMo"
    RPRO = "rpRo"

    @property
    def rigid(self) -> bool:
        return self in (Family.RTL, Family.RMO, Family.RPRO)

    @property
    def pivotal(self) -> bool:
        return not self.rigid

    @property
    def allows_dots(self) -> bool:
        return self not in (Family.TL, Family.RTL)

    @property
    def allows_arcs(self) -> bool:
        return self not in (Family.PRO, Family.RPRO)

    @classmethod
    def parse(cls, tag: str | Family) -> Family:
        if isinstance(tag, Family):
            return tag
        lowered = tag.strip().lower()
        for fam in cls:
            if fam.value.lower() == lowered:
                return fam
        raise ValueError(f"unknown family {tag!r}")


@dataclass(frozen=True)
class Diagram:
    bottom: Word
    top: Word
    partner: tuple[int, ...]

    @property
    def size(self) -> tuple[int, int]:
        return len(self.bottom), len(self.top)

    def _point(self, p: int) -> tuple[str, int]:
        nb = len(self.bottom)
        return ("b", p) if p < nb else ("t", p - nb)

    @cached_property
    def through(self) -> frozenset[tuple[int, int]]:
        nb = len(self.bottom)
        return frozenset(
            (p + 1, q - nb + 1)
            for p, q in enumerate(self.partner[:nb])
            if q >= nb
        )

    @cached_property
    def bottom_arcs(self) -> frozenset[tuple[int, int]]:
        nb = len(self.bottom)
        return frozenset(
            (p + 1, q + 1)
            for p, q in enumerate(self.partner[:nb])
            if p < q < nb
        )

    @cached_property
    def top_arcs(self) -> frozenset[tuple[int, int]]:
        nb = len(self.bottom)
        return frozenset(
            (p - nb + 1, q - nb + 1)
            for p, q in enumerate(self.partner)
            if p >= nb and q > p
        )

    @cached_property
    def bottom_dots(self) -> frozenset[int]:
        nb = len(self.bottom)
        return frozenset(p + 1 for p in range(nb) if self.partner[p] == -1)

    @cached_property
    def top_dots(self) -> frozenset[int]:
        nb = len(self.bottom)
        return frozenset(
            p - nb + 1 for p in range(nb, len(self.partner)) if self.partner[p] == -1
        )

    @cached_property
    def through_bottom(self) -> tuple[int, ...]:
        """0-based bottom positions of through strands, left to right."""
        nb = len(self.bottom)
        return tuple(p for p in range(nb) if self.partner[p] >= nb)

    @property
    def k(self) -> int:
        return len(self.through_bottom)

    @cached_property
    def alpha(self) -> Word:
        """Letters carried by the through strands, left to right."""
        return tuple(self.bottom[p] for p in self.through_bottom)

    @cached_property
    def key(self) -> bytes:
        return serialize(self, newline=False).encode("ascii")

    def __lt__(self, other: Diagram) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return serialize(self, newline=False)


def _check_planar(nb: int, nt: int, partner: Sequence[int]) -> None:
    # cyclic order: bottom left to right, then top right to left
    total = nb + nt
    order = list(range(nb)) + [nb + q for q in reversed(range(nt))]
    stack: list[int] = []
    for p in order:
        q = partner[p]
        if q == -1:
            continue
        if not stack or stack[-1] != p:
            stack.append(q)
            continue
        stack.pop()
    if stack:
        # find an explicit witness for the message
        pos = {p: i for i, p in enumerate(order)}
        pairs = sorted(
            (min(pos[p], pos[q]), max(pos[p], pos[q]))
            for p, q in enumerate(partner)
            if q > p
        )
        for a, b in pairs:
            for u, v in pairs:
                if a < u < b < v:
                    raise CrossingPairs(
                        f"pairs {_fmt_point(order[a], nb)}-{_fmt_point(order[b], nb)} and "
                        f"{_fmt_point(order[u], nb)}-{_fmt_point(order[v], nb)} cross"
                    )
        raise CrossingPairs("pairing is not planar")  # pragma: no cover
    assert total == len(partner)


def _fmt_point(p: int, nb: int) -> str:
    return f"b{p + 1}" if p < nb else f"t{p - nb + 1}"


def validate(
    bottom: Iterable[int],
    top: Iterable[int],
    *,
    through: Iterable[tuple[int, int]] = (),
    bottom_arcs: Iterable[tuple[int, int]] = (),
    top_arcs: Iterable[tuple[int, int]] = (),
    bottom_dots: Iterable[int] = (),
    top_dots: Iterable[int] = (),
    family: Family | str | None = None,
) -> Diagram:
    """Build a diagram from 1-based pair and dot lists, checking every rule.

    With ``family=None`` the rigid letter rules apply and both dots and arcs
    are allowed.
    """
    bottom = tuple(int(x) for x in bottom)
    top = tuple(int(x) for x in top)
    fam = Family.parse(family) if family is not None else None
    nb, nt = len(bottom), len(top)
    partner = [-2] * (nb + nt)

    def claim(p: int, q: int, what: str) -> None:
        for x in (p, q) if p != q else (p,):
            if partner[x] != -2:
                raise DiagramError(f"{what}: position {_fmt_point(x, nb)} used twice")
        partner[p] = q if p != q else -1
        partner[q] = p if p != q else -1

    def bpos(p: int, what: str) -> int:
        if not 1 <= p <= nb:
            raise DiagramError(f"{what}: bottom position {p} out of range")
        return p - 1

    def tpos(q: int, what: str) -> int:
        if not 1 <= q <= nt:
            raise DiagramError(f"{what}: top position {q} out of range")
        return nb + q - 1

    pivotal = fam is not None and fam.pivotal
    for p, q in through:
        bp, tq = bpos(p, "through"), tpos(q, "through")
        if bottom[p - 1] != top[q - 1]:
            raise LetterMismatch(
                f"through strand ({p},{q}) joins letters {bottom[p - 1]} and {top[q - 1]}"
            )
        claim(bp, tq, "through")
    for p, q in bottom_arcs:
        if p >= q:
            raise DiagramError(f"bottom arc ({p},{q}) needs p < q")
        bp, bq = bpos(p, "bottom arc"), bpos(q, "bottom arc")
        ok = bottom[bp] == bottom[bq] if pivotal else bottom[bp] == bottom[bq] + 1
        if not ok:
            raise LetterMismatch(
                f"bottom arc ({p},{q}) on letters {bottom[bp]},{bottom[bq]}"
            )
        claim(bp, bq, "bottom arc")
    for p, q in top_arcs:
        if p >= q:
            raise DiagramError(f"top arc ({p},{q}) needs p < q")
        tp, tq = tpos(p, "top arc"), tpos(q, "top arc")
        ok = top[p - 1] == top[q - 1] if pivotal else top[p - 1] + 1 == top[q - 1]
        if not ok:
            raise LetterMismatch(f"top arc ({p},{q}) on letters {top[p - 1]},{top[q - 1]}")
        claim(tp, tq, "top arc")
    for p in bottom_dots:
        bp = bpos(p, "dot")
        claim(bp, bp, "dot")
    for q in top_dots:
        tq = tpos(q, "dot")
        claim(tq, tq, "dot")

    missing = [x for x in range(nb + nt) if partner[x] == -2]
    if missing:
        raise UncoveredPosition(
            "uncovered position(s) " + " ".join(_fmt_point(x, nb) for x in missing)
        )
    if fam is not None:
        has_dots = any(x == -1 for x in partner)
        has_arcs = any(
            q >= 0 and (p < nb) == (q < nb) for p, q in enumerate(partner)
        )
        if has_dots and not fam.allows_dots:
            raise FamilyViolation(f"{fam.value} diagrams carry no dots")
        if has_arcs and not fam.allows_arcs:
            raise FamilyViolation(f"{fam.value} diagrams carry no arcs")
    _check_planar(nb, nt, partner)
    return Diagram(bottom, top, tuple(partner))


def check(d: Diagram, family: Family | str | None = None) -> Diagram:
    """Re-run :func:`validate` on an existing diagram."""
    return validate(
        d.bottom,
        d.top,
        through=d.through,
        bottom_arcs=d.bottom_arcs,
        top_arcs=d.top_arcs,
        bottom_dots=d.bottom_dots,
        top_dots=d.top_dots,
        family=family,
    )


def identity(w: Iterable[int]) -> Diagram:
    w = tuple(w)
    n = len(w)
    return Diagram(w, w, tuple(range(n, 2 * n)) + tuple(range(n)))


def compose(lower: Diagram, upper: Diagram) -> Diagram:
    """Stack ``upper`` on top of ``lower`` and read off the outer pairing.

    Closed middle components are dropped.  A path that dies at a middle dot
    leaves a dot on its outer endpoint.
    """
    if lower.top != upper.bottom:
        raise BoundaryMismatch(
            f"top word {list(lower.top)} of the lower factor differs from "
            f"bottom word {list(upper.bottom)} of the upper factor"
        )
    pf, pg = lower.partner, upper.partner
    nb, m = len(lower.bottom), len(lower.top)
    nt = len(upper.top)
    out = [0] * (nb + nt)

    def walk(cur: int, in_lower: bool) -> int:
        while True:
            if cur == -1:
                return -1
            if in_lower:
                if cur < nb:
                    return cur
                cur = pg[cur - nb]
                in_lower = False
            else:
                if cur >= m:
                    return nb + cur - m
                cur = pf[nb + cur]
                in_lower = True

    for p in range(nb):
        out[p] = walk(pf[p], True)
    for q in range(nt):
        out[nb + q] = walk(pg[m + q], False)
    return Diagram(lower.bottom, upper.top, tuple(out))


def tensor(f: Diagram, g: Diagram) -> Diagram:
    """Place ``g`` to the right of ``f``."""
    fb, ft = len(f.bottom), len(f.top)
    gb, gt = len(g.bottom), len(g.top)

    def fmap(p: int) -> int:
        if p == -1:
            return -1
        return p if p < fb else p + gb

    def gmap(p: int) -> int:
        if p == -1:
            return -1
        return p + fb if p < gb else p + fb + ft

    partner = (
        [fmap(x) for x in f.partner[:fb]]
        + [gmap(x) for x in g.partner[:gb]]
        + [fmap(x) for x in f.partner[fb:]]
        + [gmap(x) for x in g.partner[gb:]]
    )
    return Diagram(f.bottom + g.bottom, f.top + g.top, tuple(partner))


def flip(f: Diagram) -> Diagram:
    """Reflect upside down: bottom and top trade places."""
    nb, nt = len(f.bottom), len(f.top)

    def remap(p: int) -> int:
        if p == -1:
            return -1
        return p + nt if p < nb else p - nb

    partner = [remap(x) for x in f.partner[nb:]] + [remap(x) for x in f.partner[:nb]]
    return Diagram(f.top, f.bottom, tuple(partner))


def sandwich_factor(f: Diagram) -> tuple[Diagram, Word, Diagram]:
    """Split ``f`` as top half, through sequence and bottom half.

    Returns ``(T, alpha, B)`` with ``B`` from ``f.bottom`` to ``alpha`` and
    ``T`` from ``alpha`` to ``f.top``, so that
    ``compose(compose(B, identity(alpha)), T) == f``.
    """
    if f.bottom != f.top:
        raise NotEndomorphism("sandwich factorisation needs an endomorphism")
    nb = len(f.bottom)
    nt = len(f.top)
    through = f.through_bottom
    k = len(through)
    alpha = tuple(f.bottom[p] for p in through)
    slot = {p: i for i, p in enumerate(through)}
    top_slot = {f.partner[p] - nb: i for i, p in enumerate(through)}

    bpart = [0] * (nb + k)
    for p in range(nb):
        q = f.partner[p]
        bpart[p] = nb + slot[p] if q >= nb else q
    for i, p in enumerate(through):
        bpart[nb + i] = p
    tpart = [0] * (k + nt)
    for i, p in enumerate(through):
        tpart[i] = k + f.partner[p] - nb
    for q in range(nt):
        r = f.partner[nb + q]
        if r == -1:
            tpart[k + q] = -1
        elif r < nb:
            tpart[k + q] = top_slot[q]
        else:
            tpart[k + q] = k + r - nb
    bottom_half = Diagram(f.bottom, alpha, tuple(bpart))
    top_half = Diagram(alpha, f.top, tuple(tpart))
    return top_half, alpha, bottom_half


# ---------------------------------------------------------------- text format

def serialize(f: Diagram, newline: bool = True) -> str:
    tokens = [f"T({p},{q})" for p, q in f.through]
    tokens += [f"B({p},{q})" for p, q in f.bottom_arcs]
    tokens += [f"U({p},{q})" for p, q in f.top_arcs]
    tokens += [f"Db({p})" for p in f.bottom_dots]
    tokens += [f"Dt({q})" for q in f.top_dots]
    tokens.sort()
    line = (
        ",".join(map(str, f.bottom))
        + ";"
        + ",".join(map(str, f.top))
        + ";"
        + " ".join(tokens)
    )
    return line + "\n" if newline else line


_TOKEN = re.compile(r"(T|B|U)\((\d+),(\d+)\)|(Db|Dt)\((\d+)\)")
_LETTERS = re.compile(r"-?\d+(,-?\d+)*")


def _parse_word(text: str, offset: int) -> Word:
    if text == "":
        return ()
    if not _LETTERS.fullmatch(text):
        raise ParseError(f"bad letter list {text!r}", offset)
    return tuple(int(x) for x in text.split(","))


def parse(text: str, family: Family | str | None = None) -> Diagram:
    """Inverse of :func:`serialize`; the result is run through :func:`validate`."""
    if text.endswith("\n"):
        text = text[:-1]
    if not text.isascii():
        raise ParseError("non-ASCII input", next(i for i, c in enumerate(text) if not c.isascii()))
    first = text.find(";")
    second = text.find(";", first + 1) if first >= 0 else -1
    if first < 0 or second < 0:
        raise ParseError("expected two ';' separators", len(text))
    bottom = _parse_word(text[:first], 0)
    top = _parse_word(text[first + 1 : second], first + 1)
    pairs: dict[str, list] = {"T": [], "B": [], "U": [], "Db": [], "Dt": []}
    pos = second + 1
    body = text[pos:]
    if body:
        i = 0
        while i <= len(body):
            m = _TOKEN.match(body, i)
            if m is None:
                raise ParseError("bad token", pos + i)
            if m.group(1):
                pairs[m.group(1)].append((int(m.group(2)), int(m.group(3))))
            else:
                pairs[m.group(4)].append(int(m.group(5)))
            i = m.end()
            if i == len(body):
                break
            if body[i] != " ":
                raise ParseError("expected a space between tokens", pos + i)
            i += 1
    return validate(
        bottom,
        top,
        through=pairs["T"],
        bottom_arcs=pairs["B"],
        top_arcs=pairs["U"],
        bottom_dots=pairs["Db"],
        top_dots=pairs["Dt"],
        family=family,
    )
