"""Closed-form asymptotic bounds on gaps and gap ratios, and figure data.

A bound is stored symbolically as

    C * (prod_b b^(e_b))^n * n^p * exp(-a0 - a1/n)

with ``C`` and the per-``n`` factor both products of rational powers of
2, 3, 5, pi and e.  Floats appear only when evaluating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import Iterable, Mapping

from . import combinat
from .diagram import Family
from .errors import NotStated, UnknownPrefactor
from .reps import feasible_ks, truncation_window

# finite-n sandwich tolerance in log10
LOG10_TOLERANCE = 0.1

_LOG10 = {
    "2": math.log10(2),
    "3": math.log10(3),
    "5": math.log10(5),
    "pi": math.log10(math.pi),
    "e": math.log10(math.e),
}


def _log10_product(powers: Mapping[str, Fr]) -> float:
    return sum(float(e) * _LOG10[b] for b, e in powers.items())


@dataclass(frozen=True)
class BoundExpr:
    coefficient: Mapping[str, Fr] = field(default_factory=dict)
    per_n: Mapping[str, Fr] = field(default_factory=dict)
    poly_power: Fr = Fr(0)
    exp_correction: tuple[Fr, Fr] = (Fr(0), Fr(0))
    known: bool = True
    text: str = ""

    @property
    def exp_base(self) -> float:
        """The base ``a`` of the ``a^n`` factor."""
        return 10 ** _log10_product(self.per_n)

    @property
    def exp_base_exact(self) -> Fr | None:
        """``a`` as a rational when every per-n exponent is an integer."""
        if any(e.denominator != 1 or b in ("pi", "e") for b, e in self.per_n.items()):
            return None
        out = Fr(1)
        for b, e in self.per_n.items():
            out *= Fr(int(b)) ** int(e)
        return out


def _expr(
    text: str,
    coef: Mapping[str, Fr] | None = None,
    base: Mapping[str, Fr] | None = None,
    p: Fr = Fr(0),
    corr: tuple[Fr, Fr] = (Fr(0), Fr(0)),
    known: bool = True,
) -> BoundExpr:
    return BoundExpr(dict(coef or {}), dict(base or {}), Fr(p), (Fr(corr[0]), Fr(corr[1])), known, text)


h = Fr(1, 2)

# (family, quantity, side) -> expression for the published gap bounds
_BOUNDS: dict[tuple[Family, str, str], BoundExpr] = {
    # pivotal families
    (Family.TL, "gap", "lower"): _expr("2^(-5/2) n^(-5/2) 4^n", {"2": Fr(-5, 2)}, {"2": Fr(2)}, Fr(-5, 2)),
    (Family.TL, "gap", "upper"): _expr("2^(-5/2) n^(-3/2) 4^n", {"2": Fr(-5, 2)}, {"2": Fr(2)}, Fr(-3, 2)),
    (Family.MO, "gap", "lower"): _expr("f(n) 9^n", {}, {"3": Fr(2)}, known=False),
    (Family.MO, "gap", "upper"): _expr("2^(-3/2) n^(-3/2) 4^n", {"2": Fr(-3, 2)}, {"2": Fr(2)}, Fr(-3, 2)),
    (Family.PRO, "gap", "lower"): _expr(
        "pi^(-1/2) e^(-2-1/(3n)) n^(-1/2) 4^n", {"pi": -h}, {"2": Fr(2)}, -h, (Fr(2), Fr(1, 3))
    ),
    (Family.PRO, "gap", "upper"): _expr("pi^(-1/2) n^(-1/2) 4^n", {"pi": -h}, {"2": Fr(2)}, -h),
    (Family.TL, "ratio", "lower"): _expr(
        "2^(-7/4) pi^(3/4) n^(-7/4)", {"2": Fr(-7, 4), "pi": Fr(3, 4)}, {}, Fr(-7, 4)
    ),
    (Family.TL, "ratio", "upper"): _expr(
        "2^(-3/4) pi^(3/4) n^(-3/4)", {"2": Fr(-3, 4), "pi": Fr(3, 4)}, {}, Fr(-3, 4)
    ),
    (Family.MO, "ratio", "lower"): _expr("pi^(1/4) 4^(-1) 3^(-3/4) f(n) n^(3/4)", {}, {}, known=False),
    (Family.MO, "ratio", "upper"): _expr(
        "2^(1/2) pi^(1/4) 3^(-3/4) n^(-3/4)", {"2": h, "pi": Fr(1, 4), "3": Fr(-3, 4)}, {}, Fr(-3, 4)
    ),
    (Family.PRO, "ratio", "lower"): _expr(
        "pi^(-1/4) 2^(1/4) e^(-2-1/(3n)) n^(-1/4)",
        {"pi": Fr(-1, 4), "2": Fr(1, 4)}, {}, Fr(-1, 4), (Fr(2), Fr(1, 3)),
    ),
    (Family.PRO, "ratio", "upper"): _expr(
        "pi^(-1/4) 2^(1/4) n^(-1/4)", {"pi": Fr(-1, 4), "2": Fr(1, 4)}, {}, Fr(-1, 4)
    ),
    # rigid families
    (Family.RTL, "gap", "lower"): _expr(
        "2^(-1/2) pi^(-1/2) e^(-1-1/(3n)) n^(-1/2) 2^n",
        {"2": -h, "pi": -h}, {"2": Fr(1)}, -h, (Fr(1), Fr(1, 3)),
    ),
    (Family.RTL, "gap", "upper"): _expr(
        "2^(-1/2) pi^(-1/2) n^(-1/2) 2^n", {"2": -h, "pi": -h}, {"2": Fr(1)}, -h
    ),
    (Family.RMO, "ssgap", "lower"): _expr(
        "pi^(-1/2) e^(-1/n) n^(-3/2) 4^n", {"pi": -h}, {"2": Fr(2)}, Fr(-3, 2), (Fr(0), Fr(1))
    ),
    (Family.RMO, "ssgap", "upper"): _expr(
        "4 2^(1/2) pi^(-1/2) e^(-1/n) n^(-1) 4^n",
        {"2": Fr(5, 2), "pi": -h}, {"2": Fr(2)}, Fr(-1), (Fr(0), Fr(1)),
    ),
    (Family.RPRO, "gap", "lower"): _expr(
        "2^(1/2) pi^(-1/2) e^(-4-16/(3n)) n^(-1/2) 2^n",
        {"2": h, "pi": -h}, {"2": Fr(1)}, -h, (Fr(4), Fr(16, 3)),
    ),
    (Family.RPRO, "gap", "upper"): _expr(
        "2^(1/2) pi^(-1/2) n^(-1/2) 2^n", {"2": h, "pi": -h}, {"2": Fr(1)}, -h
    ),
    (Family.RTL, "ratio", "lower"): _expr(
        "2^(1/4) pi^(-1/4) e^(-1-1/(3n)) n^(-1/4)",
        {"2": Fr(1, 4), "pi": Fr(-1, 4)}, {}, Fr(-1, 4), (Fr(1), Fr(1, 3)),
    ),
    (Family.RTL, "ratio", "upper"): _expr(
        "2^(1/4) pi^(-1/4) n^(-1/4)", {"2": Fr(1, 4), "pi": Fr(-1, 4)}, {}, Fr(-1, 4)
    ),
    (Family.RMO, "ssratio", "lower"): _expr(
        "pi^(-1/2) e^(-1/n) n^(-3/2)", {"pi": -h}, {}, Fr(-3, 2), (Fr(0), Fr(1))
    ),
    (Family.RMO, "ssratio", "upper"): _expr(
        "4 2^(1/2) pi^(-1/2) n^(-1)", {"2": Fr(5, 2), "pi": -h}, {}, Fr(-1)
    ),
    (Family.RPRO, "ratio", "upper"): _expr(
        "2^(3n/2) 3^(3n/4) 5^(-5n/4)", {}, {"2": Fr(3, 2), "3": Fr(3, 4), "5": Fr(-5, 4)}
    ),
}

QUANTITIES = ("gap", "ssgap", "ratio", "ssratio")
SIDES = ("lower", "upper")


def bound(family: Family | str, quantity: str, side: str) -> BoundExpr:
    fam = Family.parse(family)
    if quantity not in QUANTITIES or side not in SIDES:
        raise NotStated(f"unknown quantity/side {quantity}/{side}")
    key = (fam, quantity, side)
    if key in _BOUNDS:
        return _BOUNDS[key]
    if fam.rigid:
        # rTL and rpRo simple modules are their cell modules, so ss and exact agree;
        # for rMo only the semisimple gap is bounded
        swap = {"gap": "ssgap", "ssgap": "gap", "ratio": "ssratio", "ssratio": "ratio"}[quantity]
        if (fam, swap, side) in _BOUNDS:
            return _BOUNDS[(fam, swap, side)]
    raise NotStated(f"no {side} bound on {quantity} of {fam.value}")


def stated_bounds() -> list[tuple[Family, str, str]]:
    return sorted(_BOUNDS, key=lambda t: (list(Family).index(t[0]), QUANTITIES.index(t[1]), t[2]))


def eval_log10(expr: BoundExpr, n: int | float) -> float:
    if not expr.known:
        raise UnknownPrefactor(f"{expr.text} has an unknown prefactor")
    a0, a1 = expr.exp_correction
    return (
        _log10_product(expr.coefficient)
        + n * _log10_product(expr.per_n)
        + float(expr.poly_power) * math.log10(n)
        - (float(a0) + float(a1) / n) * _LOG10["e"]
    )


# ---------------------------------------------------------------- exact values in log space

def log10_binomial(a: int, b: int) -> float:
    if b < 0 or b > a:
        return float("-inf")
    return (math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)) / math.log(10)


def log10_int(x: int) -> float:
    return math.log10(x) if x > 0 else float("-inf")


def rtl_truncated_gap_log10(n: int) -> float:
    """log10 of the rTL truncated gap: the right-cell size at the window ends."""
    ks = truncation_window(Family.RTL, n)
    return min(log10_binomial(n - 1, (2 * n - k) // 2) for k in (ks[0], ks[-1]))


def rpro_truncated_gap_log10(n: int) -> float:
    """log10 of the rpRo truncated gap, the smallest C(n + j, k) over the window.

    C(n + j, k) grows with j, so j = 0 attains the minimum at each k.
    """
    ks = truncation_window(Family.RPRO, n)
    return min(log10_binomial(n, k) for k in (ks[0], ks[-1]))


def rmo_truncated_ssgap_log10(n: int) -> float:
    """log10 of the smallest rMo right cell over the window, all j."""
    ks = truncation_window(Family.RMO, n)
    return min(
        v
        for k in ks
        for j in range(k // 2 + 1)
        if (v := combinat.rmo_right_log10(n, k, j)) > float("-inf")
    )


def log10_monoid_size(family: Family | str, n: int) -> float:
    return log10_int(combinat.monoid_size(family, n))


# ---------------------------------------------------------------- CSV exports

BOUNDS_HEADER = "family,quantity,side,n,log10_value,known"
FIGURE_HEADER = "figure_id,series,n_or_k,log10_value"
FIGURE_IDS = ("intro_gap", "intro_ratio", "rtl_trunc", "rmo_trunc", "rmo_bulk", "rpro_trunc", "rpro_bulk")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def bounds_rows(n_list: Iterable[int]) -> list[str]:
    rows = []
    for fam, q, side in stated_bounds():
        expr = _BOUNDS[(fam, q, side)]
        for n in n_list:
            value = _fmt(eval_log10(expr, n)) if expr.known else ""
            rows.append(f"{fam.value},{q},{side},{n},{value},{int(expr.known)}")
    return rows


def intro_table(n_list: Iterable[int]) -> list[str]:
    """Gap curves for the introduction comparison: bounds for every family plus
    the exact closed-form truncated gaps of the rigid families."""
    n_list = list(n_list)
    rows = []
    for fam, q, side in stated_bounds():
        if q not in ("gap", "ssgap"):
            continue
        expr = _BOUNDS[(fam, q, side)]
        if not expr.known:
            continue
        for n in n_list:
            rows.append(f"intro_gap,{fam.value}_{q}_{side},{n},{_fmt(eval_log10(expr, n))}")
    exact = {
        "rTL_gap_exact": rtl_truncated_gap_log10,
        "rMo_ssgap_exact": rmo_truncated_ssgap_log10,
        "rpRo_gap_exact": rpro_truncated_gap_log10,
    }
    for series, fn in exact.items():
        for n in n_list:
            rows.append(f"intro_gap,{series},{n},{_fmt(fn(n))}")
    return rows


def _per_k_rows(figure: str, series: str, values: Mapping[int, int]) -> list[str]:
    return [f"{figure},{series},{k},{_fmt(log10_int(v))}" for k, v in sorted(values.items()) if v > 0]


def _window_rows(figure: str, family: Family, n: int, values: Mapping[int, int]) -> list[str]:
    ks = truncation_window(family, n)
    return [f"{figure},window,{k},{_fmt(log10_int(values[k]))}" for k in (ks[0], ks[-1])]


def _rtl_dims(n: int) -> dict[int, int]:
    return {k: combinat.cell_count(Family.RTL, n, k, None, "right") for k in feasible_ks(Family.RTL, n)}


def _rigid_min_dims(fam: Family, n: int) -> dict[int, int]:
    out = {}
    for k in range(2 * n + 1):
        vals = [combinat.cell_count(fam, n, k, j, "right", verify=False) for j in range(k // 2 + 1)]
        vals = [v for v in vals if v]
        if vals:
            out[k] = min(vals)
    return out


def _rigid_bulk(fam: Family, n: int) -> dict[int, int]:
    out = {}
    for k in range(2 * n + 1):
        out[k] = sum(
            combinat.sequence_count(k, j)
            * combinat.cell_count(fam, n, k, j, "right", verify=False)
            * combinat.cell_count(fam, n, k, j, "left", verify=False)
            for j in range(k // 2 + 1)
        )
    return out


def figure_rows(figure: str, n: int | None = None) -> list[str]:
    """Data behind one figure; ``n`` overrides the size the figure was drawn at."""
    if figure == "intro_gap":
        return intro_table(range(10, 1001, 10) if n is None else range(10, n + 1, 10))
    if figure == "intro_ratio":
        return _intro_ratio(100 if n is None else n)
    if figure == "rtl_trunc":
        n = 100 if n is None else n
        dims = _rtl_dims(n)
        return _per_k_rows(figure, "dim", dims) + _window_rows(figure, Family.RTL, n, dims)
    if figure == "rmo_trunc":
        n = 100 if n is None else n
        dims = _rigid_min_dims(Family.RMO, n)
        ks = truncation_window(Family.RMO, n)
        return _per_k_rows(figure, "ssdim_min_over_j", dims) + [
            f"{figure},window,{ks[-1]},{_fmt(log10_int(dims[ks[-1]]))}"
        ]
    if figure == "rmo_bulk":
        n = 100 if n is None else n
        bulk = _rigid_bulk(Family.RMO, n)
        ks = truncation_window(Family.RMO, n)
        return _per_k_rows(figure, "elements", bulk) + [
            f"{figure},window,{ks[-1]},{_fmt(log10_int(bulk[ks[-1]]))}"
        ]
    if figure == "rpro_trunc":
        n = 200 if n is None else n
        dims = _rigid_min_dims(Family.RPRO, n)
        return _per_k_rows(figure, "dim_min_over_j", dims) + _window_rows(figure, Family.RPRO, n, dims)
    if figure == "rpro_bulk":
        n = 200 if n is None else n
        bulk = _rigid_bulk(Family.RPRO, n)
        return _per_k_rows(figure, "elements", bulk) + _window_rows(figure, Family.RPRO, n, bulk)
    raise ValueError(f"unknown figure {figure!r}")


def _intro_ratio(n: int) -> list[str]:
    """Per-apex gap ratio ``dim / sqrt(|M|)`` at fixed ``n`` for TL and rTL."""
    rows = []
    tl_half = combinat.pivotal_half_counts(Family.TL, 2 * n)
    tl_size = log10_monoid_size(Family.TL, n)
    for k in feasible_ks(Family.TL, n):
        rows.append(f"intro_ratio,TL,{k},{_fmt(log10_int(tl_half[k]) - tl_size / 2)}")
    rtl = _rtl_dims(n)
    rtl_size = log10_monoid_size(Family.RTL, n)
    for k, v in sorted(rtl.items()):
        if v:
            rows.append(f"intro_ratio,rTL,{k},{_fmt(log10_int(v) - rtl_size / 2)}")
    for k in (truncation_window(Family.RTL, n)[0], truncation_window(Family.RTL, n)[-1]):
        rows.append(f"intro_ratio,rTL_window,{k},{_fmt(log10_int(rtl[k]) - rtl_size / 2)}")
    return rows
