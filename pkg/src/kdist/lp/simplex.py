"""Exact rational two-phase simplex (Dantzig pricing, Bland fallback on stalls).

Every optimal solve returns a primal/dual pair whose objectives agree exactly;
the pair is re-checked against the original (non-standard) problem before it
is handed back, so callers never see an unverified optimum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from gmpy2 import mpq

from kdist.exact import frac, fmt

_OPS = ("<=", ">=", "==")
BLAND_AFTER = 50


class LPError(RuntimeError):
    pass


@dataclass
class LPInstance:
    """min/max c.x subject to rows (coeffs, op, rhs); variables nonneg unless free."""

    note: str = ""
    sense: str = "min"
    names: list[str] = field(default_factory=list)
    free: list[bool] = field(default_factory=list)
    objective: dict[int, Fraction] = field(default_factory=dict)
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def add_var(self, name: str | None = None, free: bool = False) -> int:
        self.names.append(name if name is not None else f"x{len(self.names)}")
        self.free.append(free)
        return len(self.names) - 1

    def add_row(self, coeffs: dict[int, object], op: str, rhs) -> int:
        if op not in _OPS:
            raise ValueError(f"bad row operator {op!r}")
        clean = {j: frac(v) for j, v in coeffs.items() if v != 0}
        self.rows.append((clean, op, frac(rhs)))
        return len(self.rows) - 1

    def set_objective(self, coeffs: dict[int, object], sense: str = "min") -> None:
        if sense not in ("min", "max"):
            raise ValueError(sense)
        self.sense = sense
        self.objective = {j: frac(v) for j, v in coeffs.items() if v != 0}

    def dumps(self) -> str:
        lines = [f"# lp {self.note}".rstrip(), f"sense {self.sense}"]
        for name, fr in zip(self.names, self.free):
            lines.append(f"var {name} {'free' if fr else 'nonneg'}")
        lines.append("obj " + " ".join(f"{j}:{fmt(v)}" for j, v in sorted(self.objective.items())))
        for coeffs, op, rhs in self.rows:
            body = " ".join(f"{j}:{fmt(v)}" for j, v in sorted(coeffs.items()))
            lines.append(f"row {body} {op} {fmt(rhs)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "LPInstance":
        lp = cls()
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# lp"):
                    lp.note = line[4:].strip()
                continue
            head, _, rest = line.partition(" ")
            if head == "sense":
                lp.sense = rest.strip()
            elif head == "var":
                name, kind = rest.split()
                lp.add_var(name, free=(kind == "free"))
            elif head == "obj":
                lp.objective = _parse_terms(rest.split())
            elif head == "row":
                toks = rest.split()
                lp.rows.append((_parse_terms(toks[:-2]), toks[-2], frac(toks[-1])))
            else:
                raise LPError(f"unrecognised LP line: {raw!r}")
        return lp


def _parse_terms(toks: Iterable[str]) -> dict[int, Fraction]:
    out = {}
    for t in toks:
        j, v = t.split(":")
        out[int(j)] = frac(v)
    return out


@dataclass
class LPSolution:
    status: str  # optimal | infeasible | unbounded
    objective: Fraction | None = None
    x: list[Fraction] = field(default_factory=list)
    duals: list[Fraction] = field(default_factory=list)
    pivots: int = 0
    certified: bool = False

    def dumps(self) -> str:
        lines = [f"status {self.status}", f"pivots {self.pivots}"]
        if self.status == "optimal":
            lines.append(f"objective {fmt(self.objective)}")
            lines.append("x " + " ".join(fmt(v) for v in self.x))
            lines.append("y " + " ".join(fmt(v) for v in self.duals))
            lines.append(f"certified {self.certified}")
        return "\n".join(lines) + "\n"


class _Tableau:
    def __init__(self, A, b, ncols):
        m = len(A)
        self.m = m
        self.n = ncols  # structural columns; artificials follow
        self.rows = []
        for i in range(m):
            row = A[i] + [mpq(0)] * m
            row[ncols + i] = mpq(1)
            self.rows.append(row)
        self.rhs = list(b)
        self.basis = [ncols + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r, c, obj):
        prow = self.rows[r]
        pv = prow[c]
        if pv != 1:
            inv = 1 / pv
            prow = [v * inv for v in prow]
            self.rows[r] = prow
            self.rhs[r] *= inv
        nz = [j for j, v in enumerate(prow) if v != 0]
        prhs = self.rhs[r]
        for i in range(self.m):
            if i == r:
                continue
            row = self.rows[i]
            f = row[c]
            if f == 0:
                continue
            for j in nz:
                row[j] -= f * prow[j]
            self.rhs[i] -= f * prhs
        f = obj[0][c]
        if f != 0:
            cost = obj[0]
            for j in nz:
                cost[j] -= f * prow[j]
            obj[1] -= f * prhs
        self.basis[r] = c
        self.pivots += 1

    def run(self, obj, allowed, rule="dantzig"):
        """Pivot on reduced-cost row obj=[costs, value]; returns 'optimal' or 'unbounded'.

        Dantzig's rule (lowest index on ties) until BLAND_AFTER consecutive
        degenerate pivots, then Bland's rule for the rest of the phase, which
        rules out cycling.
        """
        bland = rule == "bland"
        stall = 0
        while True:
            cost = obj[0]
            if bland:
                enter = next((j for j in allowed if cost[j] < 0), None)
            else:
                enter, best_c = None, 0
                for j in allowed:
                    if cost[j] < best_c:
                        enter, best_c = j, cost[j]
            if enter is None:
                return "optimal"
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            if best[0][0] == 0:
                stall += 1
                if stall >= BLAND_AFTER:
                    bland = True
            else:
                stall = 0
            self.pivot(best[1], enter, obj)


def _standard_form(lp: LPInstance):
    cols = []  # (orig var, sign)
    colmap = []
    for j in range(lp.nvars):
        colmap.append([len(cols)])
        cols.append((j, 1))
        if lp.free[j]:
            colmap[j].append(len(cols))
            cols.append((j, -1))
    nslack = sum(1 for _, op, _ in lp.rows if op != "==")
    ncols = len(cols) + nslack
    A, b, flips = [], [], []
    s = len(cols)
    for coeffs, op, rhs in lp.rows:
        row = [mpq(0)] * ncols
        for j, v in coeffs.items():
            row[colmap[j][0]] = mpq(v.numerator, v.denominator)
            if lp.free[j]:
                row[colmap[j][1]] = -row[colmap[j][0]]
        if op == "<=":
            row[s] = mpq(1)
            s += 1
        elif op == ">=":
            row[s] = mpq(-1)
            s += 1
        r = mpq(rhs.numerator, rhs.denominator)
        flip = r < 0
        if flip:
            row = [-v for v in row]
            r = -r
        A.append(row)
        b.append(r)
        flips.append(flip)
    sign = 1 if lp.sense == "min" else -1
    c = [mpq(0)] * ncols
    for j, v in lp.objective.items():
        q = mpq(v.numerator, v.denominator) * sign
        c[colmap[j][0]] = q
        if lp.free[j]:
            c[colmap[j][1]] = -q
    return A, b, c, cols, flips, ncols


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def solve(lp: LPInstance, rule: str = "dantzig") -> LPSolution:
    """Solve exactly; optimal results carry a verified zero-gap dual certificate."""
    A, b, c, cols, flips, ncols = _standard_form(lp)
    m = len(A)
    if m == 0:
        if any(v != 0 for v in lp.objective.values()):
            # any nonzero cost on an unconstrained variable is unbounded or zero-optimal
            sign = 1 if lp.sense == "min" else -1
            for j, v in lp.objective.items():
                if lp.free[j] or v * sign < 0:
                    return LPSolution("unbounded")
        return LPSolution("optimal", Fraction(0), [Fraction(0)] * lp.nvars, [], 0, True)
    tab = _Tableau(A, b, ncols)
    allowed = list(range(ncols))
    # phase 1: minimise the sum of artificials
    cost1 = [mpq(0)] * (ncols + m)
    for i in range(m):
        for j in range(ncols):
            cost1[j] -= tab.rows[i][j]
    obj1 = [cost1, -sum(b, mpq(0))]
    tab.run(obj1, allowed, rule)
    if obj1[1] != 0:
        return LPSolution("infeasible", pivots=tab.pivots)
    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= ncols:
            j = next((j for j in range(ncols) if tab.rows[r][j] != 0), None)
            if j is not None:
                tab.pivot(r, j, obj1)
    # phase 2
    cost2 = list(c) + [mpq(0)] * m
    val = mpq(0)
    for i in range(m):
        cb = cost2[tab.basis[i]]
        if cb != 0:
            row = tab.rows[i]
            for j in range(ncols + m):
                if row[j] != 0:
                    cost2[j] -= cb * row[j]
            val -= cb * tab.rhs[i]
    obj2 = [cost2, val]
    status = tab.run(obj2, allowed, rule)
    if status == "unbounded":
        return LPSolution("unbounded", pivots=tab.pivots)
    xs = [mpq(0)] * ncols
    for i, j in enumerate(tab.basis):
        if j < ncols:
            xs[j] = tab.rhs[i]
    x = [Fraction(0)] * lp.nvars
    for k, (j, sgn) in enumerate(cols):
        x[j] += _to_fraction(xs[k]) * sgn
    ys = [-obj2[0][ncols + i] for i in range(m)]
    sign = 1 if lp.sense == "min" else -1
    duals = [_to_fraction(-y if flip else y) * sign for y, flip in zip(ys, flips)]
    objective = sum((v * x[j] for j, v in lp.objective.items()), Fraction(0))
    sol = LPSolution("optimal", objective, x, duals, tab.pivots)
    sol.certified = verify_certificate(lp, sol)
    if not sol.certified:
        raise LPError("simplex produced a primal/dual pair that failed exact verification")
    return sol


def verify_certificate(lp: LPInstance, sol: LPSolution) -> bool:
    """Check primal feasibility, dual feasibility and zero duality gap exactly."""
    x, y = sol.x, sol.duals
    for j in range(lp.nvars):
        if not lp.free[j] and x[j] < 0:
            return False
    for (coeffs, op, rhs), yi in zip(lp.rows, y):
        lhs = sum((v * x[j] for j, v in coeffs.items()), Fraction(0))
        if (op == "<=" and lhs > rhs) or (op == ">=" and lhs < rhs) or (op == "==" and lhs != rhs):
            return False
        # sign conventions written for a min problem; max flips them
        s = yi if lp.sense == "min" else -yi
        if (op == ">=" and s < 0) or (op == "<=" and s > 0):
            return False
    reduced = [lp.objective.get(j, Fraction(0)) for j in range(lp.nvars)]
    for (coeffs, _, _), yi in zip(lp.rows, y):
        for j, v in coeffs.items():
            reduced[j] -= v * yi
    for j, d in enumerate(reduced):
        dd = d if lp.sense == "min" else -d
        if lp.free[j] and dd != 0:
            return False
        if not lp.free[j] and dd < 0:
            return False
    dual_obj = sum((rhs * yi for (_, _, rhs), yi in zip(lp.rows, y)), Fraction(0))
    primal_obj = sum((v * x[j] for j, v in lp.objective.items()), Fraction(0))
    return dual_obj == primal_obj == sol.objective
