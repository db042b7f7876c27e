"""Allocation of a regulation requirement across heterogeneous IBRs.

Given the total virtual inertia and damping the VPP must provide, this module
splits them across inverter-based resources (IBRs) with per-unit provision
costs and box constraints. Two kinds of objectives compete, all minimized:

* the VPP operator's aggregate provision cost, and
* one objective per IBR measuring how far its damping assignment falls short
  of its rating-proportional share of the requirement (IBRs are compensated
  per unit of damping, so a shortfall is lost revenue).

A weighted-sum scalarization of these objectives separates into two
independent continuous fill problems (one for inertia, one for damping), each
solved exactly by a greedy rule: start every resource at its lower bound and
pour the remaining total into resources in ascending order of effective
marginal cost. Sampling weight vectors from the flat Dirichlet distribution
and keeping non-dominated outcomes traces the Pareto front; a Nash bargaining
rule then picks the compromise point, using the componentwise worst front
outcome as the disagreement point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFrontError, InfeasibleError, MissingCompensationError

__all__ = [
    "IbrSpec",
    "AllocationProblem",
    "Allocation",
    "ObjectiveVector",
    "ParetoPoint",
    "BargainResult",
    "ComparisonReport",
    "solve_scalarized",
    "evaluate_objectives",
    "pareto_front",
    "non_dominated_mask",
    "nash_bargain",
    "compare_single_objective",
    "vpp_profit",
]

# Slack used for dominance comparisons and fill-equality checks; objective
# scales here are order 1-100, so 1e-9 is far below any physical resolution.
_TOL = 1e-9


@dataclass(frozen=True)
class IbrSpec:
    """One inverter-based resource.

    alpha:   inertia provision cost, per s
    beta:    damping provision cost, per p.u.
    p_rated: power rating, p.u. on the system base
    h_min/h_max: inertia box, s (h_max None selects the rating-share default)
    d_min/d_max: damping box, p.u. (d_max None selects the rating-share default)
    """

    alpha: float
    beta: float
    p_rated: float
    h_min: float = 0.0
    h_max: float | None = None
    d_min: float = 0.0
    d_max: float | None = None

    def __post_init__(self) -> None:
        if not self.alpha > 0.0 or not self.beta > 0.0:
            raise ValueError("provision costs alpha and beta must be strictly positive")
        if not self.p_rated > 0.0:
            raise ValueError("p_rated must be strictly positive")
        if self.h_min < 0.0 or self.d_min < 0.0:
            raise ValueError("box lower bounds must be non-negative")
        if self.h_max is not None and self.h_max < self.h_min:
            raise ValueError("h_max must be >= h_min")
        if self.d_max is not None and self.d_max < self.d_min:
            raise ValueError("d_max must be >= d_min")


@dataclass
class AllocationProblem:
    """Requirement totals plus the IBR fleet that must absorb them.

    h_re/d_re:    required totals, s and p.u.
    delta_p:      design disturbance magnitude, p.u. (sets rating shares)
    compensation: optional (price per s of inertia, price per p.u. of damping)
                  paid to the VPP, used only for profit reporting

    Missing box upper bounds default to the resource's rating-proportional
    share of the requirement (clamped up to the lower bound), which also
    keeps every per-IBR shortfall objective non-negative.
    """

    ibrs: tuple[IbrSpec, ...]
    h_re: float
    d_re: float
    delta_p: float
    compensation: tuple[float, float] | None = None
    alphas: np.ndarray = field(init=False, repr=False)
    betas: np.ndarray = field(init=False, repr=False)
    p_rated: np.ndarray = field(init=False, repr=False)
    h_lo: np.ndarray = field(init=False, repr=False)
    h_hi: np.ndarray = field(init=False, repr=False)
    d_lo: np.ndarray = field(init=False, repr=False)
    d_hi: np.ndarray = field(init=False, repr=False)
    d_ideal: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.ibrs = tuple(self.ibrs)
        if not self.ibrs:
            raise ValueError("at least one IBR is required")
        if self.h_re < 0.0 or self.d_re < 0.0:
            raise ValueError("requirement totals must be non-negative")
        if not self.delta_p > 0.0:
            raise ValueError("delta_p must be strictly positive")
        self.alphas = np.array([u.alpha for u in self.ibrs])
        self.betas = np.array([u.beta for u in self.ibrs])
        self.p_rated = np.array([u.p_rated for u in self.ibrs])
        share = self.p_rated / self.delta_p
        self.h_lo = np.array([u.h_min for u in self.ibrs])
        self.d_lo = np.array([u.d_min for u in self.ibrs])
        self.h_hi = np.array(
            [
                u.h_max if u.h_max is not None else max(self.h_re * s, u.h_min)
                for u, s in zip(self.ibrs, share)
            ]
        )
        self.d_hi = np.array(
            [
                u.d_max if u.d_max is not None else max(self.d_re * s, u.d_min)
                for u, s in zip(self.ibrs, share)
            ]
        )
        self.d_ideal = self.d_re * share
        for total, lo, hi, what in (
            (self.h_re, self.h_lo, self.h_hi, "inertia"),
            (self.d_re, self.d_lo, self.d_hi, "damping"),
        ):
            if total < lo.sum() - _TOL or total > hi.sum() + _TOL:
                raise InfeasibleError(
                    f"{what} requirement {total:.6g} outside box totals "
                    f"[{lo.sum():.6g}, {hi.sum():.6g}]"
                )

    @property
    def n(self) -> int:
        return len(self.ibrs)


@dataclass
class Allocation:
    """Per-IBR assignment of inertia (s) and damping (p.u.)."""

    h: np.ndarray
    d: np.ndarray


@dataclass
class ObjectiveVector:
    """Objective values of one allocation, all minimized.

    f_vpp: aggregate provision cost to the VPP operator
    f_ibr: per-IBR damping shortfall against the rating-proportional share
    """

    f_vpp: float
    f_ibr: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.f_vpp], self.f_ibr))


@dataclass
class ParetoPoint:
    """One sampled outcome: normalized weights, allocation, objectives."""

    weights: np.ndarray
    allocation: Allocation
    objectives: ObjectiveVector


@dataclass
class BargainResult:
    """Outcome of Nash bargaining over a candidate front.

    nash_value is the product of gains over the disagreement point at the
    chosen point. When every candidate has at least one zero gain the plain
    product cannot discriminate (degenerate = True); selection then falls
    back to the largest count of strictly positive gains, ties broken by the
    product over those positive gains, then by lowest front index.
    positive_count/positive_product always describe the chosen point.
    """

    chosen: ParetoPoint
    chosen_index: int
    disagreement: ObjectiveVector
    nash_value: float
    degenerate: bool
    positive_count: int
    positive_product: float
    front: list[ParetoPoint]


@dataclass
class ComparisonReport:
    """Bargaining outcome versus the pure cost-minimal (economic) outcome.

    Effective bargaining values equal the plain Nash product on a
    non-degenerate front and the product of strictly positive gains on a
    degenerate one. Deltas are bargaining minus economic, so a positive
    nash_delta means bargaining improved the collective gain and a positive
    f_vpp_delta is the operator's cost premium for that compromise.
    """

    bargain: BargainResult
    economic: ParetoPoint
    economic_nash: float
    economic_positive_count: int
    economic_positive_product: float
    bargain_effective: float
    economic_effective: float
    nash_delta: float
    nash_delta_pct: float | None
    f_vpp_bargain: float
    f_vpp_economic: float
    f_vpp_delta: float
    f_vpp_delta_pct: float | None


def _greedy_fill(cost: np.ndarray, target: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Exact minimizer of cost.x subject to sum(x) = target, lo <= x <= hi.

    Start at the lower bounds and fill remaining capacity in ascending cost
    order (stable sort, so equal costs fill in index order).
    """
    x = lo.astype(float).copy()
    rem = target - float(x.sum())
    if rem < -_TOL:
        raise InfeasibleError(f"target {target:.6g} below the lower-bound total")
    for k in np.argsort(cost, kind="stable"):
        if rem <= 0.0:
            break
        take = min(float(hi[k] - lo[k]), rem)
        if take > 0.0:
            x[k] = lo[k] + take
            rem -= take
    if rem > _TOL:
        raise InfeasibleError(f"box capacity too small to absorb target {target:.6g}")
    return x


def solve_scalarized(problem: AllocationProblem, weights: np.ndarray) -> Allocation:
    """Exact optimum of the weighted-sum objective for one weight vector.

    Weights are (operator weight, one weight per IBR); any non-negative
    vector with positive sum is accepted and normalized, so scaling all
    weights by a positive constant cannot change the result. The scalarized
    objective separates: inertia sees effective cost w0*alpha and damping
    sees w0*beta - w_k (the IBR weights subsidize damping procurement).
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (problem.n + 1,):
        raise ValueError(f"expected {problem.n + 1} weights, got shape {w.shape}")
    if np.any(w < -1e-12):
        raise ValueError("weights must be non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise ValueError("weights must not all be zero")
    w = np.clip(w, 0.0, None) / total
    h = _greedy_fill(w[0] * problem.alphas, problem.h_re, problem.h_lo, problem.h_hi)
    d = _greedy_fill(w[0] * problem.betas - w[1:], problem.d_re, problem.d_lo, problem.d_hi)
    return Allocation(h=h, d=d)


def evaluate_objectives(problem: AllocationProblem, allocation: Allocation) -> ObjectiveVector:
    """Objective vector (operator cost, per-IBR damping shortfalls)."""
    f_vpp = float(problem.alphas @ allocation.h + problem.betas @ allocation.d)
    return ObjectiveVector(f_vpp=f_vpp, f_ibr=problem.d_ideal - allocation.d)


def _sampled_points(problem: AllocationProblem, n_samples: int, seed: int) -> list[ParetoPoint]:
    """Solve the scalarization at flat-Dirichlet weight samples, in order."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    draws = rng.exponential(size=(n_samples, problem.n + 1))
    weights = draws / draws.sum(axis=1, keepdims=True)
    points = []
    for w in weights:
        alloc = solve_scalarized(problem, w)
        points.append(ParetoPoint(weights=w, allocation=alloc, objectives=evaluate_objectives(problem, alloc)))
    return points


def non_dominated_mask(objectives: np.ndarray, tol: float = _TOL) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (all minimized).

    Row j dominates row i when it is no worse everywhere (within tol) and
    strictly better somewhere (beyond tol); exact duplicates are all kept.
    """
    obj = np.asarray(objectives, dtype=float)
    no_worse = (obj[:, None, :] <= obj[None, :, :] + tol).all(axis=-1)
    better = (obj[:, None, :] < obj[None, :, :] - tol).any(axis=-1)
    dominates = no_worse & better
    np.fill_diagonal(dominates, False)
    return ~dominates.any(axis=0)


def pareto_front(problem: AllocationProblem, n_samples: int = 200, seed: int = 0) -> list[ParetoPoint]:
    """Sampled Pareto front, in sampling order (deterministic for a seed)."""
    points = _sampled_points(problem, n_samples, seed)
    objs = np.array([p.objectives.as_array() for p in points])
    keep = non_dominated_mask(objs)
    return [p for p, k in zip(points, keep) if k]


def _gain_stats(obj: np.ndarray, disagreement: np.ndarray) -> tuple[float, int, float]:
    """(plain Nash product, count of positive gains, product of positive gains)
    for one objective vector against the disagreement point. A point that is
    worse than the disagreement in any coordinate gets a plain product of 0."""
    gains = disagreement - obj
    if np.any(gains < -1e-12):
        return 0.0, int(np.sum(gains > 0.0)), 0.0
    gains = np.clip(gains, 0.0, None)
    pos = gains[gains > 0.0]
    count = int(pos.size)
    # Multiply in log-space so long gain vectors cannot overflow/underflow;
    # any zero factor collapses the full product to 0 before this step.
    prod_pos = float(np.exp(np.sum(np.log(pos)))) if count else 0.0
    plain = prod_pos if count == gains.size else 0.0
    return plain, count, prod_pos


def nash_bargain(front: list[ParetoPoint]) -> BargainResult:
    """Select the Nash bargaining solution from a candidate front.

    The disagreement point is the componentwise worst outcome across the
    front. The chosen point maximizes the product of gains over it; when
    every candidate has a zero gain somewhere the documented degenerate
    fallback ranks by (count of positive gains, product of positive gains),
    with the lowest index winning remaining ties.
    """
    if not front:
        raise EmptyFrontError("cannot bargain over an empty front")
    objs = np.array([p.objectives.as_array() for p in front])
    disagreement = objs.max(axis=0)
    stats = [_gain_stats(row, disagreement) for row in objs]
    best = max(range(len(front)), key=lambda i: stats[i][0])
    degenerate = stats[best][0] <= 0.0
    if degenerate:
        best = max(range(len(front)), key=lambda i: (stats[i][1], stats[i][2]))
    plain, count, prod_pos = stats[best]
    return BargainResult(
        chosen=front[best],
        chosen_index=best,
        disagreement=ObjectiveVector(f_vpp=float(disagreement[0]), f_ibr=disagreement[1:].copy()),
        nash_value=plain,
        degenerate=degenerate,
        positive_count=count,
        positive_product=prod_pos,
        front=front,
    )


def compare_single_objective(
    problem: AllocationProblem, n_samples: int = 200, seed: int = 0
) -> ComparisonReport:
    """Bargain over the sampled front and compare against pure cost minimization.

    The economic outcome puts all weight on the operator cost; it joins the
    candidate set before dominance filtering, so the bargaining value can
    never fall below it by construction.
    """
    points = _sampled_points(problem, n_samples, seed)
    econ_w = np.zeros(problem.n + 1)
    econ_w[0] = 1.0
    econ_alloc = solve_scalarized(problem, econ_w)
    econ = ParetoPoint(
        weights=econ_w, allocation=econ_alloc, objectives=evaluate_objectives(problem, econ_alloc)
    )
    candidates = points + [econ]
    objs = np.array([p.objectives.as_array() for p in candidates])
    keep = non_dominated_mask(objs)
    front = [p for p, k in zip(candidates, keep) if k]
    result = nash_bargain(front)

    disagreement = result.disagreement.as_array()
    econ_nash, econ_count, econ_prod = _gain_stats(econ.objectives.as_array(), disagreement)
    if result.degenerate:
        bargain_eff, econ_eff = result.positive_product, econ_prod
    else:
        bargain_eff, econ_eff = result.nash_value, econ_nash
    nash_delta = bargain_eff - econ_eff
    f_vpp_b = result.chosen.objectives.f_vpp
    f_vpp_e = econ.objectives.f_vpp
    f_vpp_delta = f_vpp_b - f_vpp_e
    return ComparisonReport(
        bargain=result,
        economic=econ,
        economic_nash=econ_nash,
        economic_positive_count=econ_count,
        economic_positive_product=econ_prod,
        bargain_effective=bargain_eff,
        economic_effective=econ_eff,
        nash_delta=nash_delta,
        nash_delta_pct=(100.0 * nash_delta / econ_eff) if econ_eff > 0.0 else None,
        f_vpp_bargain=f_vpp_b,
        f_vpp_economic=f_vpp_e,
        f_vpp_delta=f_vpp_delta,
        f_vpp_delta_pct=(100.0 * f_vpp_delta / f_vpp_e) if f_vpp_e > 0.0 else None,
    )


def vpp_profit(problem: AllocationProblem, allocation: Allocation) -> float:
    """Operator profit: compensation for the requirement minus provision cost."""
    if problem.compensation is None:
        raise MissingCompensationError("no compensation prices configured on the problem")
    price_h, price_d = problem.compensation
    cost = evaluate_objectives(problem, allocation).f_vpp
    return price_h * problem.h_re + price_d * problem.d_re - cost
