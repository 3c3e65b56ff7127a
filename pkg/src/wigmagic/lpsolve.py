"""Deterministic revised simplex solver with dual certificates.

Problems have the form::

    minimize    c @ x
    subject to  a_eq @ x == b_eq
                a_ub @ x <= b_ub
                x >= lb            (entries of lb may be -inf)

The solver converts to standard form, runs a two-phase revised simplex with
Bland's rule (deterministic and cycle-free), and reports Lagrange multipliers
in the convention

    c = a_eq.T @ y_eq - a_ub.T @ y_ub + z,   y_ub >= 0,  z >= 0,

so that the dual objective is ``b_eq @ y_eq - b_ub @ y_ub + lb @ z``.
Instances are tiny (a few hundred columns), so a dense explicit basis
inverse with periodic refactorization is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-9
COST_TOL = 1e-11
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 40

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"
_NOT_DUAL_FEASIBLE = "not_dual_feasible"


class LPError(RuntimeError):
    """Raised when an LP that must be solvable is reported infeasible or unbounded."""


def _matrix(a, ncols: int) -> np.ndarray:
    if a is None:
        return np.zeros((0, ncols))
    a = np.array(a, dtype=float, copy=True)
    return a.reshape(-1, ncols)


def _vector(b, size: int) -> np.ndarray:
    if b is None:
        return np.zeros(size)
    return np.array(b, dtype=float, copy=True).ravel()


@dataclass(frozen=True)
class LPProblem:
    c: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lb: np.ndarray | None = None

    def __post_init__(self):
        c = _vector(self.c, 0) if self.c is not None else None
        if c is None or c.size == 0:
            raise ValueError("objective must be a non-empty vector")
        n = c.size
        a_eq, a_ub = _matrix(self.a_eq, n), _matrix(self.a_ub, n)
        b_eq, b_ub = _vector(self.b_eq, a_eq.shape[0]), _vector(self.b_ub, a_ub.shape[0])
        lb = np.zeros(n) if self.lb is None else _vector(self.lb, n)
        if b_eq.size != a_eq.shape[0] or b_ub.size != a_ub.shape[0] or lb.size != n:
            raise ValueError("inconsistent LP dimensions")
        for name, arr in (("c", c), ("a_eq", a_eq), ("b_eq", b_eq), ("a_ub", a_ub), ("b_ub", b_ub)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        if np.any(np.isnan(lb)) or np.any(lb == np.inf):
            raise ValueError("lower bounds must be finite or -inf")
        for name, arr in (("c", c), ("a_eq", a_eq), ("b_eq", b_eq), ("a_ub", a_ub), ("b_ub", b_ub), ("lb", lb)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def nvars(self) -> int:
        return self.c.size

    def scaled(self, k: float) -> "LPProblem":
        return LPProblem(k * self.c, self.a_eq, self.b_eq, self.a_ub, self.b_ub, self.lb)


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray
    y_eq: np.ndarray
    y_ub: np.ndarray
    z: np.ndarray
    objective: float
    dual_objective: float
    iterations: int
    primal_residual: float = np.inf
    dual_residual: float = np.inf
    trace: tuple[float, ...] = field(default=(), repr=False)
    basis: tuple[int, ...] = field(default=(), repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def gap(self) -> float:
        return abs(self.objective - self.dual_objective)

    def certified(self, tol: float = FEAS_TOL) -> bool:
        return self.optimal and max(self.primal_residual, self.dual_residual, self.gap) <= tol


class _Simplex:
    """Revised simplex on ``min c x, A x = b, x >= 0`` with ``b >= 0``."""

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self.a = a
        self.b = b
        self.iterations = 0

    def refactor(self, basis):
        self.binv = np.linalg.inv(self.a[:, basis])

    def run_dual(self, c, basis, max_iter):
        """Dual simplex from a dual-feasible basis until the basic solution is nonnegative."""
        a, b = self.a, self.b
        self.refactor(basis)
        y = c[basis] @ self.binv
        d = c - y @ a
        d[basis] = 0.0
        if np.any(d < -COST_TOL):
            return _NOT_DUAL_FEASIBLE
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            xb = self.binv @ b
            neg = np.flatnonzero(xb < -1e-12)
            if neg.size == 0:
                return OPTIMAL
            r = int(min(neg, key=lambda i: basis[i]))
            alpha = self.binv[r] @ a
            alpha[basis] = 0.0
            cand = np.flatnonzero(alpha < -PIVOT_TOL)
            if cand.size == 0:
                return INFEASIBLE
            y = c[basis] @ self.binv
            d = np.maximum(c - y @ a, 0.0)
            ratios = d[cand] / -alpha[cand]
            j = int(cand[np.flatnonzero(ratios <= ratios.min() + 1e-12)[0]])
            u = self.binv @ a[:, j]
            basis[r] = j
            self.iterations += 1
            pivot_row = self.binv[r] / u[r]
            self.binv -= np.outer(u, pivot_row)
            self.binv[r] = pivot_row
            if self.iterations % REFACTOR_EVERY == 0:
                self.refactor(basis)

    def run(self, c, basis, max_iter, trace=None, offset=0.0):
        a, b = self.a, self.b
        self.refactor(basis)
        since_refactor = 0
        rechecked = False
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            xb = self.binv @ b
            if trace is not None:
                trace.append(float(c[basis] @ xb) + offset)
            y = c[basis] @ self.binv
            d = c - y @ a
            d[basis] = 0.0
            candidates = np.flatnonzero(d < -COST_TOL)
            if candidates.size == 0:
                if rechecked or since_refactor == 0:
                    return OPTIMAL
                # confirm optimality against a fresh factorization before stopping
                self.refactor(basis)
                since_refactor = 0
                rechecked = True
                continue
            rechecked = False
            j = int(candidates[0])
            u = self.binv @ a[:, j]
            rows = np.flatnonzero(u > PIVOT_TOL)
            if rows.size == 0:
                return UNBOUNDED
            ratios = np.maximum(xb[rows], 0.0) / u[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12]
            r = int(min(ties, key=lambda i: basis[i]))
            basis[r] = j
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self.refactor(basis)
                since_refactor = 0
            else:
                pivot_row = self.binv[r] / u[r]
                self.binv -= np.outer(u, pivot_row)
                self.binv[r] = pivot_row


def _standard_form(p: LPProblem):
    finite = np.isfinite(p.lb)
    free = np.flatnonzero(~finite)
    shift = np.where(finite, p.lb, 0.0)
    # columns: x' (one per variable), x^- for free variables, then one slack per inequality
    a_rows = np.vstack([p.a_eq, p.a_ub])
    m_eq, m_ub = p.a_eq.shape[0], p.a_ub.shape[0]
    a_std = np.hstack([a_rows, -a_rows[:, free], np.vstack([np.zeros((m_eq, m_ub)), np.eye(m_ub)])])
    b_std = np.concatenate([p.b_eq, p.b_ub]) - a_rows @ shift
    c_std = np.concatenate([p.c, -p.c[free], np.zeros(m_ub)])
    return a_std, b_std, c_std, free, shift


def solve(problem: LPProblem, max_iter: int | None = None, warm_start=None) -> LPSolution:
    """Solve ``problem``; never raises on infeasible/unbounded input, check ``status``.

    ``warm_start`` may be the ``basis`` of an earlier solution of a problem
    with the same constraint matrix and costs; only right-hand sides may
    differ. The solver then restores primal feasibility with dual simplex
    steps instead of running phase 1, falling back to a cold start when the
    basis is unusable.
    """
    p = problem
    a_std, b_std, c_std, free, shift = _standard_form(p)
    m, nstd = a_std.shape
    if max_iter is None:
        max_iter = 50 * (m + nstd) + 1000
    if warm_start is not None:
        sol = _solve_warm(p, a_std, b_std, c_std, free, shift, list(warm_start), max_iter)
        if sol is not None:
            return sol
    return _solve_cold(p, a_std, b_std, c_std, free, shift, max_iter)


def _solve_cold(p, a_std, b_std, c_std, free, shift, max_iter) -> LPSolution:
    n = p.nvars
    m_eq = p.a_eq.shape[0]
    m, nstd = a_std.shape
    offset = float(p.c @ shift)
    flip = b_std < 0
    a_std = a_std.copy()
    b_std = b_std.copy()
    a_std[flip] *= -1
    b_std[flip] *= -1

    # phase 1: slacks of unflipped inequality rows start basic, artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        if i >= m_eq and not flip[i]:
            basis.append(n + free.size + (i - m_eq))
        else:
            art_rows.append(i)
            basis.append(nstd + len(art_rows) - 1)
    n_art = len(art_rows)
    art = np.zeros((m, n_art))
    art[art_rows, np.arange(n_art)] = 1.0
    engine = _Simplex(np.hstack([a_std, art]), b_std)
    status = engine.run(np.concatenate([np.zeros(nstd), np.ones(n_art)]), basis, max_iter)
    if status != OPTIMAL:
        return _failed(p, status, engine.iterations)
    infeas = float(np.sum((engine.binv @ b_std)[[k for k, v in enumerate(basis) if v >= nstd]]))
    if infeas > FEAS_TOL * max(1.0, np.abs(b_std).max(initial=0.0)):
        return _failed(p, INFEASIBLE, engine.iterations)

    # drive remaining zero-level artificials out of the basis, dropping redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < nstd:
            continue
        alpha = engine.binv[r] @ a_std
        alpha[[v for v in basis if v < nstd]] = 0.0
        cand = np.flatnonzero(np.abs(alpha) > PIVOT_TOL)
        if cand.size:
            basis[r] = int(cand[0])
            engine.refactor(basis)
        else:
            keep[r] = False
    rows = np.flatnonzero(keep)
    basis = [basis[r] for r in rows]
    engine2 = _Simplex(a_std[rows], b_std[rows])
    engine2.iterations = engine.iterations
    trace: list[float] = []
    status = engine2.run(c_std, basis, max_iter, trace=trace, offset=offset)
    if status != OPTIMAL:
        return _failed(p, status, engine2.iterations)
    ystd = np.zeros(m)
    ystd[rows] = c_std[basis] @ engine2.binv
    ystd[flip] *= -1
    full_basis = tuple(basis) if rows.size == m else ()
    return _extract(p, engine2, b_std[rows], c_std, basis, ystd, free, shift, tuple(trace), full_basis)


def _solve_warm(p, a_std, b_std, c_std, free, shift, basis, max_iter) -> LPSolution | None:
    m, nstd = a_std.shape
    if len(basis) != m or len(set(basis)) != m or not all(0 <= j < nstd for j in basis):
        return None
    engine = _Simplex(a_std, b_std)
    try:
        status = engine.run_dual(c_std, basis, max_iter)
    except np.linalg.LinAlgError:
        return None
    if status == INFEASIBLE:
        return _failed(p, INFEASIBLE, engine.iterations)
    if status != OPTIMAL:
        return None
    trace: list[float] = []
    status = engine.run(c_std, basis, max_iter, trace=trace, offset=float(p.c @ shift))
    if status != OPTIMAL:
        return None
    ystd = c_std[basis] @ engine.binv
    return _extract(p, engine, b_std, c_std, basis, ystd, free, shift, tuple(trace), tuple(basis))


def _extract(p, engine, b_rows, c_std, basis, ystd, free, shift, trace, full_basis) -> LPSolution:
    n = p.nvars
    m_eq = p.a_eq.shape[0]
    xstd = np.zeros(c_std.size)
    xstd[basis] = engine.binv @ b_rows
    xstd[np.abs(xstd) < 1e-14] = 0.0
    x = xstd[:n] + shift
    x[free] -= xstd[n : n + free.size]
    y_eq = ystd[:m_eq]
    y_ub = -ystd[m_eq:]
    z = p.c - p.a_eq.T @ y_eq + p.a_ub.T @ y_ub
    z[free] = 0.0
    return _certify(p, x, y_eq, y_ub, z, engine.iterations, trace, full_basis)


def _failed(p: LPProblem, status: str, iterations: int) -> LPSolution:
    nan = np.full(p.nvars, np.nan)
    return LPSolution(
        status,
        nan,
        np.full(p.a_eq.shape[0], np.nan),
        np.full(p.a_ub.shape[0], np.nan),
        nan.copy(),
        np.nan,
        np.nan,
        iterations,
    )


def residuals(p: LPProblem, x, y_eq, y_ub, z) -> tuple[float, float]:
    """Primal and dual feasibility residuals (max-norm) of a candidate pair."""
    finite = np.isfinite(p.lb)
    primal = max(
        np.abs(p.a_eq @ x - p.b_eq).max(initial=0.0),
        np.maximum(p.a_ub @ x - p.b_ub, 0.0).max(initial=0.0),
        np.maximum(p.lb[finite] - x[finite], 0.0).max(initial=0.0),
    )
    stationarity = p.c - p.a_eq.T @ y_eq + p.a_ub.T @ y_ub - z
    dual = max(
        np.abs(stationarity).max(initial=0.0),
        np.maximum(-y_ub, 0.0).max(initial=0.0),
        np.maximum(-z[finite], 0.0).max(initial=0.0),
        np.abs(z[~finite]).max(initial=0.0),
    )
    return float(primal), float(dual)


def dual_objective(p: LPProblem, y_eq, y_ub, z) -> float:
    finite = np.isfinite(p.lb)
    return float(p.b_eq @ y_eq - p.b_ub @ y_ub + p.lb[finite] @ z[finite])


def _certify(p, x, y_eq, y_ub, z, iterations, trace, basis=()) -> LPSolution:
    # clear sign noise on multipliers that are zero up to roundoff
    y_ub = np.where(np.abs(y_ub) < 1e-13, 0.0, y_ub)
    z = np.where(np.abs(z) < 1e-13, 0.0, z)
    primal, dual = residuals(p, x, y_eq, y_ub, z)
    return LPSolution(
        OPTIMAL,
        x,
        y_eq,
        y_ub,
        z,
        float(p.c @ x),
        dual_objective(p, y_eq, y_ub, z),
        iterations,
        primal,
        dual,
        trace,
        basis,
    )


def solve_certified(problem: LPProblem, tol: float = FEAS_TOL) -> LPSolution:
    """Solve and raise :class:`LPError` unless an optimal certificate within ``tol`` is found."""
    sol = solve(problem)
    if not sol.optimal:
        raise LPError(f"LP not solved: {sol.status}")
    if not sol.certified(tol):
        raise LPError(
            "LP certificate outside tolerance: "
            f"primal {sol.primal_residual:.2e}, dual {sol.dual_residual:.2e}, gap {sol.gap:.2e}"
        )
    return sol


def write_lp(problem: LPProblem, path) -> None:
    """Dump a problem in a plain text format readable by :func:`read_lp`."""

    def fmt(v):
        return " ".join(repr(float(t)) for t in v)

    lines = [f"wigmagic-lp 1 {problem.nvars}", "minimize", fmt(problem.c)]
    for tag, a, b in (("eq", problem.a_eq, problem.b_eq), ("ub", problem.a_ub, problem.b_ub)):
        lines.append(f"{tag} {a.shape[0]}")
        lines.extend(f"{fmt(row)} | {float(rhs)!r}" for row, rhs in zip(a, b))
    lines.append("lb")
    lines.append(fmt(problem.lb))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_lp(path) -> LPProblem:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = lines[0].split()
    if header[:2] != ["wigmagic-lp", "1"]:
        raise ValueError(f"{path}: not a wigmagic LP dump")
    n = int(header[2])
    c = np.array(lines[2].split(), dtype=float)
    pos = 3
    blocks = {}
    for tag in ("eq", "ub"):
        name, count = lines[pos].split()
        if name != tag:
            raise ValueError(f"{path}: expected section {tag!r}")
        count = int(count)
        rows, rhs = [], []
        for ln in lines[pos + 1 : pos + 1 + count]:
            left, right = ln.split("|")
            rows.append(np.array(left.split(), dtype=float))
            rhs.append(float(right))
        blocks[tag] = (np.array(rows).reshape(count, n), np.array(rhs))
        pos += 1 + count
    lb = np.array(lines[pos + 1].split(), dtype=float)
    return LPProblem(c, *blocks["eq"], *blocks["ub"], lb)
