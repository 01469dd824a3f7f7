"""Balanced optimal transport over cosine-distance cost matrices.

The change score for a word is the optimal objective of the transport
problem between its two periods' usage sets, with uniform marginals
(1/m per source occurrence, 1/n per destination occurrence). The exact
solver is a network simplex on the transportation graph; an entropically
regularized Sinkhorn solver (log domain) is available as a faster
approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import EmptyInput, Infeasible, NumericalFailure
from .geometry import pairwise_cosine_distances
from .occurrences import UsageSet

MARGINAL_TOL = 1e-9

# Reduced-cost threshold for optimality; costs are O(1) so this leaves
# suboptimality far below the 1e-9 objective tolerance.
_RCOST_TOL = 1e-12

# Flows at or below this are treated as zero when picking a leaving arc.
_DEGENERATE_TOL = 1e-15


@dataclass(frozen=True)
class OTProblem:
    """Cost matrix plus balanced marginals (each side sums to 1)."""

    cost: np.ndarray  # (m, n) nonnegative finite
    source_weights: np.ndarray  # (m,) sums to 1
    dest_weights: np.ndarray  # (n,) sums to 1

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=np.float64)
        a = np.asarray(self.source_weights, dtype=np.float64)
        b = np.asarray(self.dest_weights, dtype=np.float64)
        if cost.ndim != 2 or cost.shape != (a.shape[0], b.shape[0]):
            raise Infeasible(
                f"cost shape {cost.shape} does not match marginals ({a.shape[0]}, {b.shape[0]})"
            )
        if not np.all(np.isfinite(cost)) or np.any(cost < 0):
            raise NumericalFailure("cost matrix must be nonnegative and finite")
        if np.any(a < 0) or np.any(b < 0):
            raise Infeasible("negative marginal weight")
        if abs(a.sum() - 1.0) > MARGINAL_TOL or abs(b.sum() - 1.0) > MARGINAL_TOL:
            raise Infeasible("marginals must each sum to 1 (balanced problem)")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "source_weights", a)
        object.__setattr__(self, "dest_weights", b)


@dataclass(frozen=True)
class TransportPlan:
    """A coupling between source and destination masses."""

    flows: np.ndarray  # (m, n) nonnegative
    objective: float
    converged: bool = True
    iterations: int = 0
    marginal_error: float = 0.0


def build_cost_matrix(src: UsageSet, dst: UsageSet) -> np.ndarray:
    """|src| x |dst| matrix of cosine distances between occurrence vectors."""
    if len(src) == 0 or len(dst) == 0:
        raise EmptyInput("usage sets must be nonempty")
    try:
        return pairwise_cosine_distances(src.vectors, dst.vectors)
    except Exception as exc:
        # Attach the offending occ_id when we can recover the row index.
        msg = str(exc)
        if "row" in msg:
            for name, uset in (("source", src), ("destination", dst)):
                if name in msg and uset.occ_ids:
                    idx = int(msg.rsplit("row", 1)[1])
                    raise type(exc)(f"{msg} (occ_id={uset.occ_ids[idx]!r})") from exc
        raise


def uniform_problem(cost: np.ndarray) -> OTProblem:
    """Uniform 1/m source and 1/n destination marginals over a cost matrix."""
    cost = np.asarray(cost, dtype=np.float64)
    m, n = cost.shape
    return OTProblem(cost, np.full(m, 1.0 / m), np.full(n, 1.0 / n))


# ---------------------------------------------------------------------------
# Exact solver: transportation-network simplex.
#
# Nodes are the m sources and n sinks; the basis is a spanning tree of
# m + n - 1 arcs. Each pivot finds an arc with negative reduced cost,
# traces the unique basis cycle it closes, and shifts flow around it.
# Entering-arc rule is most-negative (Dantzig); after a bounded run of
# degenerate pivots it falls back to Bland's rule, which guarantees
# termination.
# ---------------------------------------------------------------------------


def _northwest_corner(a: np.ndarray, b: np.ndarray):
    m, n = a.shape[0], b.shape[0]
    flows = np.zeros((m, n))
    basis = []
    supply = a.copy()
    demand = b.copy()
    i = j = 0
    while True:
        t = min(supply[i], demand[j])
        flows[i, j] = t
        basis.append((i, j))
        supply[i] -= t
        demand[j] -= t
        if i == m - 1 and j == n - 1:
            break
        if j == n - 1 or (i < m - 1 and supply[i] <= demand[j]):
            i += 1
        else:
            j += 1
    return flows, basis


def _potentials(basis_rows, basis_cols, cost, m, n):
    """Solve u_i + v_j = c_ij over the basis tree, rooted at row 0."""
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            for j in basis_rows[idx]:
                if np.isnan(v[j]):
                    v[j] = cost[idx, j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in basis_cols[idx]:
                if np.isnan(u[i]):
                    u[i] = cost[i, idx] - v[idx]
                    stack.append(("r", i))
    if np.any(np.isnan(u)) or np.any(np.isnan(v)):
        raise NumericalFailure("basis is not a spanning tree")
    return u, v


def _basis_path(basis_rows, basis_cols, start_row, end_col, m):
    """Node path from a row to a column through the basis tree."""
    # BFS over the bipartite basis graph; nodes: rows 0..m-1, cols m..m+n-1.
    target = m + end_col
    prev = {start_row: None}
    frontier = [start_row]
    while frontier:
        nxt = []
        for node in frontier:
            if node < m:
                neighbors = (m + j for j in basis_rows[node])
            else:
                neighbors = iter(basis_cols[node - m])
            for nb in neighbors:
                if nb not in prev:
                    prev[nb] = node
                    if nb == target:
                        path = [nb]
                        while prev[path[-1]] is not None:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(nb)
        frontier = nxt
    raise NumericalFailure("basis tree disconnected")


def solve_exact(problem: OTProblem, max_pivots: Optional[int] = None) -> TransportPlan:
    """Globally optimal transport plan via network simplex.

    Deterministic for identical input. Raises NumericalFailure if the
    pivot budget is exhausted or the result violates the marginal
    tolerance.
    """
    cost = problem.cost
    a, b = problem.source_weights, problem.dest_weights
    m, n = cost.shape
    if max_pivots is None:
        max_pivots = 200 * (m + n) * max(m, n) + 1000

    flows, basis = _northwest_corner(a, b)
    basis_rows = [set() for _ in range(m)]
    basis_cols = [set() for _ in range(n)]
    for i, j in basis:
        basis_rows[i].add(j)
        basis_cols[j].add(i)

    in_basis = np.zeros((m, n), dtype=bool)
    for i, j in basis:
        in_basis[i, j] = True

    degenerate_streak = 0
    bland_threshold = 50 * (m + n)
    pivots = 0
    while True:
        if pivots > max_pivots:
            raise NumericalFailure(f"pivot budget exhausted after {pivots} pivots")
        u, v = _potentials(basis_rows, basis_cols, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        reduced[in_basis] = 0.0

        if degenerate_streak > bland_threshold:
            # Bland's rule: first improving arc in row-major order.
            candidates = np.argwhere(reduced < -_RCOST_TOL)
            if candidates.size == 0:
                break
            ei, ej = int(candidates[0][0]), int(candidates[0][1])
        else:
            flat = int(np.argmin(reduced))
            ei, ej = divmod(flat, n)
            if reduced[ei, ej] >= -_RCOST_TOL:
                break

        path = _basis_path(basis_rows, basis_cols, ei, ej, m)
        # Arcs along the path alternate -, +, -, ... relative to the
        # entering arc, which takes +.
        minus_arcs = []
        plus_arcs = []
        for p in range(len(path) - 1):
            x, y = path[p], path[p + 1]
            arc = (x, y - m) if x < m else (y, x - m)
            (minus_arcs if p % 2 == 0 else plus_arcs).append(arc)

        theta = min(flows[i, j] for i, j in minus_arcs)
        leave = min(
            (arc for arc in minus_arcs if flows[arc] <= theta + _DEGENERATE_TOL),
        )
        for arc in plus_arcs:
            flows[arc] += theta
        for arc in minus_arcs:
            flows[arc] -= theta
        flows[ei, ej] += theta
        flows[leave] = 0.0

        in_basis[leave] = False
        basis_rows[leave[0]].discard(leave[1])
        basis_cols[leave[1]].discard(leave[0])
        in_basis[ei, ej] = True
        basis_rows[ei].add(ej)
        basis_cols[ej].add(ei)

        degenerate_streak = degenerate_streak + 1 if theta <= _DEGENERATE_TOL else 0
        pivots += 1

    np.clip(flows, 0.0, None, out=flows)
    row_err = float(np.abs(flows.sum(axis=1) - a).max())
    col_err = float(np.abs(flows.sum(axis=0) - b).max())
    if max(row_err, col_err) > MARGINAL_TOL:
        raise NumericalFailure(
            f"marginal violation {max(row_err, col_err):.3e} exceeds {MARGINAL_TOL}"
        )
    objective = float(np.sum(flows * cost))
    return TransportPlan(
        flows=flows,
        objective=objective,
        converged=True,
        iterations=pivots,
        marginal_error=max(row_err, col_err),
    )


def solve_sinkhorn(
    problem: OTProblem,
    reg: float,
    max_iter: int = 10_000,
    tol: float = 1e-9,
) -> TransportPlan:
    """Entropically regularized approximate plan, log-domain updates.

    Non-convergence within max_iter is reported via `converged`, not
    raised; the objective is computed on the returned plan.
    """
    if reg <= 0:
        raise NumericalFailure("regularization must be positive")
    cost = problem.cost
    a, b = problem.source_weights, problem.dest_weights
    log_a = np.log(np.where(a > 0, a, 1.0))
    log_b = np.log(np.where(b > 0, b, 1.0))
    f = np.zeros_like(a)
    g = np.zeros_like(b)
    neg_c = -cost / reg
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        f = reg * (log_a - logsumexp(neg_c + g[None, :] / reg, axis=1))
        g = reg * (log_b - logsumexp(neg_c + f[:, None] / reg, axis=0))
        if it % 10 == 0 or it == max_iter:
            plan = np.exp(neg_c + f[:, None] / reg + g[None, :] / reg)
            err = max(
                float(np.abs(plan.sum(axis=1) - a).max()),
                float(np.abs(plan.sum(axis=0) - b).max()),
            )
            if err <= tol:
                converged = True
                break
    plan = np.exp(neg_c + f[:, None] / reg + g[None, :] / reg)
    if not np.all(np.isfinite(plan)):
        raise NumericalFailure("Sinkhorn produced non-finite plan entries")
    err = max(
        float(np.abs(plan.sum(axis=1) - a).max()),
        float(np.abs(plan.sum(axis=0) - b).max()),
    )
    return TransportPlan(
        flows=plan,
        objective=float(np.sum(plan * cost)),
        converged=converged,
        iterations=it,
        marginal_error=err,
    )


def ot_change_score(
    src: UsageSet,
    dst: UsageSet,
    solver: str = "exact",
    reg: float = 0.01,
    max_iter: int = 10_000,
    tol: float = 1e-9,
) -> float:
    """Semantic-change score: optimal transport cost between usage sets.

    0 means identical usage distributions; the cosine-distance cost
    bounds the score by 2.
    """
    problem = uniform_problem(build_cost_matrix(src, dst))
    if solver == "exact":
        plan = solve_exact(problem)
    elif solver == "sinkhorn":
        plan = solve_sinkhorn(problem, reg=reg, max_iter=max_iter, tol=tol)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    return plan.objective
