"""Minimal LP layer: build a model, solve it, verify the result.

Only this module talks to a solver. Downstream code works with VarId
handles and LinearExpr objects, so swapping the backend touches exactly
one function. A brute-force vertex enumerator doubles as a reference
solver for tiny test problems.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

VarId = int

FEASIBILITY_TOL = 1e-6

# hand HiGHS tighter tolerances than the 1e-6 we verify against, so the
# post-solve check has headroom. Two failure modes force fallbacks, both
# deterministic (the attempt order is fixed): postsolve can fail to
# re-attain 1e-9 on degenerate models and report an unknown status, and
# constraints whose terms reach ~1e7 cannot be satisfied to 1e-9
# absolute at all (rounding alone is larger), so a tight-tolerance
# "infeasible" needs confirmation at stock tolerances before we believe
# it. Unbounded and optimal are scale-free verdicts and stand as is.
_TIGHT_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}
_TIGHT_NO_PRESOLVE = dict(_TIGHT_OPTIONS, presolve=False)
_STOCK_OPTIONS = {"presolve": True}
# dual simplex: deterministic and returns vertex solutions (so degenerate
# ties like simultaneous import/export resolve to a basic solution)
_SOLVER_METHOD = "highs-ds"


class Sense(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


_SENSE_ALIASES = {
    "<=": Sense.LE, "=<": Sense.LE,
    "=": Sense.EQ, "==": Sense.EQ,
    ">=": Sense.GE, "=>": Sense.GE,
}


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    SOLVER_FAILURE = "solver_failure"


class LinearExpr:
    """Immutable linear expression sum(coeff * var) + constant.

    Duplicate variables merge additively; exact-zero coefficients are
    dropped (coefficient() reports them as 0.0 either way).
    """

    __slots__ = ("coeffs", "constant")

    def __init__(self, terms: Mapping[int, float] | Iterable[tuple[int, float]] = (),
                 constant: float = 0.0):
        merged: dict[int, float] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for vid, coeff in items:
            c = float(coeff)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient {coeff} on variable {vid}")
            merged[int(vid)] = merged.get(int(vid), 0.0) + c
        constant = float(constant)
        if not math.isfinite(constant):
            raise ValueError(f"non-finite constant {constant}")
        object.__setattr__(self, "coeffs", {v: c for v, c in merged.items() if c != 0.0})
        object.__setattr__(self, "constant", constant)

    def __setattr__(self, name, value):
        raise AttributeError("LinearExpr is immutable")

    def coefficient(self, vid: VarId) -> float:
        return self.coeffs.get(vid, 0.0)

    def __add__(self, other: "LinearExpr | float") -> "LinearExpr":
        if isinstance(other, LinearExpr):
            merged = dict(self.coeffs)
            for vid, c in other.coeffs.items():
                merged[vid] = merged.get(vid, 0.0) + c
            return LinearExpr(merged, self.constant + other.constant)
        return LinearExpr(self.coeffs, self.constant + float(other))

    __radd__ = __add__

    def __sub__(self, other: "LinearExpr | float") -> "LinearExpr":
        return self + (-other if isinstance(other, LinearExpr) else -float(other))

    def __neg__(self) -> "LinearExpr":
        return self * -1.0

    def __mul__(self, k: float) -> "LinearExpr":
        k = float(k)
        if not math.isfinite(k):
            raise ValueError(f"non-finite scale factor {k}")
        return LinearExpr({v: c * k for v, c in self.coeffs.items()}, self.constant * k)

    __rmul__ = __mul__

    def evaluate(self, x: np.ndarray) -> float:
        return math.fsum(c * float(x[v]) for v, c in self.coeffs.items()) + self.constant

    def __repr__(self):
        body = " + ".join(f"{c}*x{v}" for v, c in sorted(self.coeffs.items()))
        return f"LinearExpr({body or '0'} + {self.constant})"


def term(vid: VarId, coeff: float = 1.0) -> LinearExpr:
    return LinearExpr([(vid, coeff)])


def lin_sum(exprs: Iterable[LinearExpr]) -> LinearExpr:
    """Merge many expressions in one pass (avoids quadratic chaining)."""
    merged: dict[int, float] = {}
    constant = 0.0
    for e in exprs:
        for vid, c in e.coeffs.items():
            merged[vid] = merged.get(vid, 0.0) + c
        constant += e.constant
    return LinearExpr(merged, constant)


@dataclass(frozen=True)
class Constraint:
    expr: LinearExpr
    sense: Sense
    rhs: float
    name: str = ""


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    objective_value: float
    values: np.ndarray | None
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    def value(self, vid: VarId) -> float:
        if self.values is None:
            raise ValueError(f"no solution values (status {self.status.value})")
        return float(self.values[vid])

    def value_of(self, expr: LinearExpr) -> float:
        if self.values is None:
            raise ValueError(f"no solution values (status {self.status.value})")
        return expr.evaluate(self.values)

    def series(self, vids) -> np.ndarray:
        if self.values is None:
            raise ValueError(f"no solution values (status {self.status.value})")
        return self.values[np.asarray(vids, dtype=int)]


class LpModel:
    """LP under construction: bounded variables, removable constraints,
    minimize objective."""

    def __init__(self):
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._var_names: list[str] = []
        self._constraints: dict[int, Constraint] = {}
        self._next_cid = 0
        self.objective = LinearExpr()

    # -- construction -------------------------------------------------

    def add_variable(self, lower: float = 0.0, upper: float = math.inf,
                     name: str = "") -> VarId:
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper):
            raise ValueError(f"NaN bound on variable {name!r}")
        if lower > upper:
            raise ValueError(f"lower bound {lower} exceeds upper bound {upper}"
                             f" on variable {name!r}")
        self._lb.append(lower)
        self._ub.append(upper)
        self._var_names.append(name)
        return len(self._lb) - 1

    def _check_expr(self, expr: LinearExpr) -> None:
        n = len(self._lb)
        for vid in expr.coeffs:
            if not 0 <= vid < n:
                raise ValueError(f"expression references unregistered variable {vid}")

    def add_constraint(self, expr: LinearExpr, sense: Sense | str,
                       rhs: float = 0.0, name: str = "") -> int:
        if isinstance(sense, str):
            try:
                sense = _SENSE_ALIASES[sense]
            except KeyError:
                raise ValueError(f"unknown constraint sense {sense!r}") from None
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ValueError(f"non-finite rhs {rhs} on constraint {name!r}")
        self._check_expr(expr)
        cid = self._next_cid
        self._next_cid += 1
        self._constraints[cid] = Constraint(expr, sense, rhs, name)
        return cid

    def remove_constraint(self, cid: int) -> None:
        try:
            del self._constraints[cid]
        except KeyError:
            raise ValueError(f"no constraint with id {cid}") from None

    def set_objective(self, expr: LinearExpr) -> None:
        self._check_expr(expr)
        self.objective = expr

    # -- inspection ---------------------------------------------------

    @property
    def num_variables(self) -> int:
        return len(self._lb)

    @property
    def num_constraints(self) -> int:
        return len(self._constraints)

    def bounds(self, vid: VarId) -> tuple[float, float]:
        return (self._lb[vid], self._ub[vid])

    def constraints(self) -> dict[int, Constraint]:
        return dict(self._constraints)

    def variable_name(self, vid: VarId) -> str:
        return self._var_names[vid]

    # -- feasibility --------------------------------------------------

    def check_feasibility(self, x: np.ndarray, tol: float = FEASIBILITY_TOL) -> list[str]:
        """Violations of constraints and bounds at x, scaled per row by
        max(1, |rhs|, max |a_ij x_j|). Empty list means feasible."""
        violations = []
        for vid in range(len(self._lb)):
            xv = float(x[vid])
            scale = max(1.0, abs(self._lb[vid]) if math.isfinite(self._lb[vid]) else 1.0,
                        abs(self._ub[vid]) if math.isfinite(self._ub[vid]) else 1.0)
            if xv < self._lb[vid] - tol * scale or xv > self._ub[vid] + tol * scale:
                violations.append(
                    f"variable {vid} ({self._var_names[vid]!r}) value {xv} outside "
                    f"[{self._lb[vid]}, {self._ub[vid]}]")
        for cid, cons in self._constraints.items():
            lhs = cons.expr.evaluate(x)
            scale = max(1.0, abs(cons.rhs),
                        max((abs(c * float(x[v])) for v, c in cons.expr.coeffs.items()),
                            default=0.0))
            if cons.sense is Sense.LE:
                resid = lhs - cons.rhs
            elif cons.sense is Sense.GE:
                resid = cons.rhs - lhs
            else:
                resid = abs(lhs - cons.rhs)
            if resid > tol * scale:
                violations.append(
                    f"constraint {cid} ({cons.name!r}) violated by {resid:.3e} "
                    f"(lhs {lhs}, {cons.sense.value} rhs {cons.rhs})")
        return violations

    # -- solving ------------------------------------------------------

    def solve(self) -> LpSolution:
        n = len(self._lb)
        if n == 0:
            bad = [c for c in self._constraints.values()
                   if not _constant_row_ok(c)]
            if bad:
                return LpSolution(LpStatus.INFEASIBLE, math.nan, None,
                                  "constant constraint violated")
            return LpSolution(LpStatus.OPTIMAL, self.objective.constant,
                              np.zeros(0))

        c = np.zeros(n)
        for vid, coeff in self.objective.coeffs.items():
            c[vid] = coeff

        ub_rows, ub_cols, ub_data, b_ub = [], [], [], []
        eq_rows, eq_cols, eq_data, b_eq = [], [], [], []
        for cons in self._constraints.values():
            if cons.sense is Sense.EQ:
                r = len(b_eq)
                for vid, coeff in cons.expr.coeffs.items():
                    eq_rows.append(r)
                    eq_cols.append(vid)
                    eq_data.append(coeff)
                b_eq.append(cons.rhs - cons.expr.constant)
            else:
                sign = 1.0 if cons.sense is Sense.LE else -1.0
                r = len(b_ub)
                for vid, coeff in cons.expr.coeffs.items():
                    ub_rows.append(r)
                    ub_cols.append(vid)
                    ub_data.append(sign * coeff)
                b_ub.append(sign * (cons.rhs - cons.expr.constant))

        A_ub = (sp.csr_matrix((ub_data, (ub_rows, ub_cols)), shape=(len(b_ub), n))
                if b_ub else None)
        A_eq = (sp.csr_matrix((eq_data, (eq_rows, eq_cols)), shape=(len(b_eq), n))
                if b_eq else None)

        def attempt(options):
            return linprog(c, A_ub=A_ub,
                           b_ub=np.asarray(b_ub) if b_ub else None,
                           A_eq=A_eq, b_eq=np.asarray(b_eq) if b_eq else None,
                           bounds=list(zip(self._lb, self._ub)),
                           method=_SOLVER_METHOD, options=options)

        res = attempt(_TIGHT_OPTIONS)
        if res.status not in (0, 3):
            if res.status != 2:  # unknown verdict: postsolve gave up
                res = attempt(_TIGHT_NO_PRESOLVE)
            if res.status not in (0, 3):
                res = attempt(_STOCK_OPTIONS)

        if res.status == 2:
            return LpSolution(LpStatus.INFEASIBLE, math.nan, None, res.message)
        if res.status == 3:
            return LpSolution(LpStatus.UNBOUNDED, math.nan, None, res.message)
        if res.status != 0 or res.x is None:
            return LpSolution(LpStatus.SOLVER_FAILURE, math.nan, None, res.message)

        x = np.asarray(res.x, dtype=float)
        violations = self.check_feasibility(x)
        if violations:
            return LpSolution(LpStatus.SOLVER_FAILURE, math.nan, None,
                              "solver returned an infeasible point: "
                              + "; ".join(violations[:5]))
        return LpSolution(LpStatus.OPTIMAL, self.objective.evaluate(x), x,
                          res.message)

    # -- export -------------------------------------------------------

    def write_lp(self, path) -> None:
        """Write the model in LP text format: Minimize / Subject To /
        Bounds / End, variables and constraints in id order."""
        labels = _unique_labels(self._var_names, "x")
        lines = ["\\ h2grid linear program", "Minimize"]
        lines.append(" obj: " + _format_terms(self.objective, labels))
        lines.append("Subject To")
        clabels = _unique_labels([c.name for c in self._constraints.values()], "c",
                                 ids=list(self._constraints))
        for (cid, cons), label in zip(self._constraints.items(), clabels):
            body = _format_terms(LinearExpr(cons.expr.coeffs), labels)
            rhs = cons.rhs - cons.expr.constant
            lines.append(f" {label}: {body} {cons.sense.value} {rhs!r}")
        lines.append("Bounds")
        for vid, (lo, hi) in enumerate(zip(self._lb, self._ub)):
            if lo == -math.inf and hi == math.inf:
                lines.append(f" {labels[vid]} free")
            elif hi == math.inf:
                lines.append(f" {labels[vid]} >= {lo!r}")
            elif lo == -math.inf:
                lines.append(f" {labels[vid]} <= {hi!r}")
            else:
                lines.append(f" {lo!r} <= {labels[vid]} <= {hi!r}")
        lines.append("End")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _constant_row_ok(cons: Constraint) -> bool:
    lhs = cons.expr.constant
    if cons.sense is Sense.LE:
        return lhs <= cons.rhs + FEASIBILITY_TOL
    if cons.sense is Sense.GE:
        return lhs >= cons.rhs - FEASIBILITY_TOL
    return abs(lhs - cons.rhs) <= FEASIBILITY_TOL


def _sanitize(name: str) -> str:
    out = re.sub(r"[^A-Za-z0-9_]", "_", name)
    if out and out[0].isdigit():
        out = "_" + out
    return out


def _unique_labels(names: list[str], prefix: str, ids: list[int] | None = None) -> list[str]:
    if ids is None:
        ids = list(range(len(names)))
    used: set[str] = set()
    labels = []
    for i, name in zip(ids, names):
        label = _sanitize(name) if name else f"{prefix}{i}"
        if label in used:
            label = f"{label}_{i}"
        used.add(label)
        labels.append(label)
    return labels


def _format_terms(expr: LinearExpr, labels: list[str]) -> str:
    parts = []
    for vid in sorted(expr.coeffs):
        coeff = expr.coeffs[vid]
        if not parts:
            parts.append(f"{coeff!r} {labels[vid]}")
        elif coeff >= 0:
            parts.append(f"+ {coeff!r} {labels[vid]}")
        else:
            parts.append(f"- {-coeff!r} {labels[vid]}")
    if expr.constant:
        parts.append((f"+ {expr.constant!r}" if expr.constant > 0
                      else f"- {-expr.constant!r}") if parts
                     else f"{expr.constant!r}")
    return " ".join(parts) if parts else "0"


def solve(model: LpModel) -> LpSolution:
    return model.solve()


def enumerate_solve(model: LpModel) -> LpSolution:
    """Reference solver for tiny LPs: enumerate candidate vertices from
    all n-subsets of constraint/bound hyperplanes and take the best
    feasible one. Requires <= 3 variables and finite bounds (so the
    feasible region is a polytope and the optimum sits on a vertex)."""
    n = model.num_variables
    if n == 0 or n > 3:
        raise ValueError(f"reference solver handles 1-3 variables, got {n}")
    planes: list[tuple[np.ndarray, float]] = []
    for vid in range(n):
        lo, hi = model.bounds(vid)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"reference solver requires finite bounds, "
                             f"variable {vid} has [{lo}, {hi}]")
        e = np.zeros(n)
        e[vid] = 1.0
        planes.append((e.copy(), lo))
        planes.append((e, hi))
    for cons in model.constraints().values():
        a = np.zeros(n)
        for vid, coeff in cons.expr.coeffs.items():
            a[vid] = coeff
        planes.append((a, cons.rhs - cons.expr.constant))

    best_x, best_obj = None, math.inf
    for combo in combinations(planes, n):
        A = np.vstack([a for a, _ in combo])
        b = np.array([v for _, v in combo])
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            continue
        if model.check_feasibility(x, tol=1e-7):
            continue
        obj = model.objective.evaluate(x)
        if obj < best_obj:
            best_obj, best_x = obj, x
    if best_x is None:
        return LpSolution(LpStatus.INFEASIBLE, math.nan, None, "no feasible vertex")
    return LpSolution(LpStatus.OPTIMAL, best_obj, best_x, "vertex enumeration")
