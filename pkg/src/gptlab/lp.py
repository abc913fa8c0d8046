"""Exact-rational linear programming (phase-1 simplex) with certificates.

Only feasibility problems are needed here: convex-hull membership and
supporting-covector searches.  The simplex runs over the ambient arithmetic
context, uses Bland's rule (termination without tolerances in exact mode) and
returns a Farkas certificate whenever a system is infeasible, so every answer
is independently checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .arith import EXACT, Context
from .linalg import Vector, dot, vsub


@dataclass(frozen=True)
class LpResult:
    """Outcome of a feasibility run for A x = b, x >= 0."""

    feasible: bool
    x: Optional[tuple] = None
    farkas: Optional[tuple] = None  # y with y.A <= 0 and y.b > 0


def solve_equality_feasibility(a_rows: Sequence[Vector], b: Vector, nvars: int,
                               ctx: Context = EXACT) -> LpResult:
    """Find x >= 0 with A x = b, or a Farkas certificate of infeasibility."""
    m = len(a_rows)
    if m != len(b):
        raise ValueError("row/rhs mismatch")
    one, zero = ctx.one(), ctx.zero()
    a_rows = [tuple(ctx.num(x) for x in row) for row in a_rows]
    b = tuple(ctx.num(x) for x in b)

    # Normalize to nonnegative right-hand sides, remembering the row flips.
    flip = [ctx.sign(bi) < 0 for bi in b]
    rows = []
    rhs = []
    for i in range(m):
        coeff = list(a_rows[i])
        bi = b[i]
        if flip[i]:
            coeff = [-x for x in coeff]
            bi = -bi
        rows.append(coeff + [one if j == i else zero for j in range(m)] + [bi])
        rhs.append(bi)

    total = nvars + m  # structural + artificial columns
    basis = [nvars + i for i in range(m)]

    # Objective row for min(sum of artificials): reduced costs under the
    # all-artificial basis are c_j - sum of column entries.
    obj = [zero] * (total + 1)
    for j in range(total + 1):
        s = zero
        for r in rows:
            s = s + r[j]
        cj = one if nvars <= j < total else zero
        obj[j] = cj - s

    while True:
        enter = None
        for j in range(total):
            if ctx.lt(obj[j], zero):
                enter = j  # Bland: smallest index
                break
        if enter is None:
            break
        leave = None
        best = None
        for r in range(m):
            arj = rows[r][enter]
            if ctx.lt(zero, arj):
                ratio = rows[r][total] / arj
                if best is None or ctx.lt(ratio, best) or (
                    ctx.eq(ratio, best) and basis[r] < basis[leave]
                ):
                    best = ratio
                    leave = r
        if leave is None:
            raise RuntimeError("phase-1 objective unbounded; malformed tableau")
        piv = rows[leave][enter]
        rows[leave] = [x / piv for x in rows[leave]]
        for r in range(m):
            if r != leave and not ctx.is_zero(rows[r][enter]):
                f = rows[r][enter]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[leave])]
        if not ctx.is_zero(obj[enter]):
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, rows[leave])]
        basis[leave] = enter

    value = zero
    for r in range(m):
        if basis[r] >= nvars:
            value = value + rows[r][total]

    if ctx.is_zero(value):
        x = [zero] * nvars
        for r in range(m):
            if basis[r] < nvars:
                x[basis[r]] = rows[r][total]
        return LpResult(feasible=True, x=tuple(x))

    # Farkas: y' = c_B B^{-1}; the artificial block of the tableau is B^{-1}.
    yprime = []
    for i in range(m):
        s = zero
        for r in range(m):
            if basis[r] >= nvars:
                s = s + rows[r][nvars + i]
        yprime.append(s)
    y = tuple(-yi if fl else yi for yi, fl in zip(yprime, flip))
    return LpResult(feasible=False, farkas=y)


@dataclass(frozen=True)
class HullMembership:
    """Certificate-carrying answer to 'is p in conv(gens)?'."""

    member: bool
    weights: Optional[tuple] = None      # convex combination over gens
    separating: Optional[tuple] = None   # covector h with h(p) > max_i h(g_i)

    def verify(self, p: Vector, gens: Sequence[Vector], ctx: Context = EXACT) -> bool:
        if self.member:
            w = self.weights
            if w is None or len(w) != len(gens):
                return False
            if any(ctx.lt(wi, ctx.zero()) for wi in w):
                return False
            if not ctx.eq(sum(w, ctx.zero()), ctx.one()):
                return False
            recon = [ctx.zero()] * len(p)
            for wi, g in zip(w, gens):
                recon = [a + wi * b for a, b in zip(recon, g)]
            return all(ctx.eq(a, b) for a, b in zip(recon, p))
        h = self.separating
        if h is None:
            return False
        hp = dot(h, p)
        return all(ctx.lt(dot(h, g), hp) for g in gens)


def in_hull(p: Vector, gens: Sequence[Vector], ctx: Context = EXACT) -> HullMembership:
    """Exact convex-hull membership with a weight or separation certificate."""
    if not gens:
        raise ValueError("empty generator list")
    d = len(p)
    if any(len(g) != d for g in gens):
        raise ValueError("generators and point must share one dimension")
    n = len(gens)
    one = ctx.one()
    a_rows = [tuple(g[i] for g in gens) for i in range(d)]
    a_rows.append(tuple(one for _ in range(n)))
    b = tuple(p) + (one,)
    res = solve_equality_feasibility(a_rows, b, n, ctx)
    if res.feasible:
        return HullMembership(member=True, weights=res.x)
    # y = (h, t) with h.g_i + t <= 0 for all i and h.p + t > 0.
    h = res.farkas[:d]
    return HullMembership(member=False, separating=h)


def supporting_covector(gens: Sequence[Vector], subset: frozenset,
                        ctx: Context = EXACT) -> Optional[tuple]:
    """Covector whose maximum over gens is attained exactly on ``subset``.

    Returns the covector h, or None when no such supporting functional
    exists.  The full index set is always supported (h = 0); the empty set
    is handled by the caller as a lattice convention.
    """
    n = len(gens)
    if not subset or any(i < 0 or i >= n for i in subset):
        raise ValueError("subset indices out of range")
    if len(subset) == n:
        return tuple(ctx.zero() for _ in gens[0])
    d = len(gens[0])
    anchor = min(subset)
    g0 = gens[anchor]
    inside = sorted(subset - {anchor})
    outside = sorted(set(range(n)) - subset)
    m_out = len(outside)
    nvars = 2 * d + m_out  # h = hp - hm, plus one slack per strict constraint
    a_rows = []
    b = []
    zero, one = ctx.zero(), ctx.one()
    for i in inside:
        diff = vsub(gens[i], g0)
        a_rows.append(tuple(diff) + tuple(-x for x in diff) + tuple(zero for _ in range(m_out)))
        b.append(zero)
    for k, j in enumerate(outside):
        diff = vsub(gens[j], g0)
        slack = [zero] * m_out
        slack[k] = one
        a_rows.append(tuple(diff) + tuple(-x for x in diff) + tuple(slack))
        b.append(-one)
    res = solve_equality_feasibility(a_rows, tuple(b), nvars, ctx)
    if not res.feasible:
        return None
    return tuple(res.x[i] - res.x[d + i] for i in range(d))
