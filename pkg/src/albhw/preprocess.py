"""Bound-tightening computations used by the strengthened exact model.

Four artifacts are produced from an instance:

* arc bounds: for every connected task pair (i, j), a lower bound on the
  station-index gap between them, from the continuous relaxation of the
  workload of all tasks on paths from i to j;
* station windows [e_i, l_i]: earliest/latest admissible station per task,
  via longest paths over the weighted auxiliary DAG and a station-count
  upper bound;
* per-type station caps: the maximum number of tasks a station staffed by
  a given worker type can hold (max-cardinality knapsack with conflicts);
* lifted times: inflated execution times that stay valid in capacity
  constraints (subset sum with conflicts), plus a floor on the number of
  type-1 workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Closures, Instance, compute_closures

ArcBounds = dict[tuple[int, int], int]


class WindowInfeasibleError(Exception):
    """Certifies that no solution with at most m_ub stations exists."""

    def __init__(self, task: int, earliest: int, latest: int):
        self.task = task
        self.earliest = earliest
        self.latest = latest
        super().__init__(
            f"task {task}: earliest station {earliest} exceeds latest {latest}"
        )


def compute_arc_bounds(inst: Instance, clos: Closures) -> ArcBounds:
    """Station-gap lower bounds for every connected ordered pair.

    For a pair (i, j) with j reachable from i, the tasks on all i-to-j
    paths must occupy the stations between them, so at type-1 (fastest)
    times their total workload forces a minimum index gap of
    ceil(sum / C) - 1. Direct arcs with no intermediate tasks are included;
    unconnected pairs get no bound.
    """
    bounds: ArcBounds = {}
    for i in inst.tasks():
        for j in clos.succ_star(i):
            between = clos.succ_star(i) & clos.pred_star(j)
            total = inst.time(i, 1) + inst.time(j, 1)
            for k in between:
                total += inst.time(k, 1)
            bounds[(i, j)] = max(0, math.ceil(total / inst.cycle_time) - 1)
    return bounds


def compute_m_ub(z_ref: int, cheapest_cost: int, min_stations: int = 1) -> int:
    """Station-count upper bound from a known feasible solution cost.

    Any solution costing at most ``z_ref`` uses at most z_ref // c_min
    stations since every station costs at least the cheapest worker.
    ``min_stations`` (the reference solution's own station count) guards
    the bound from below; the result is never below 1.
    """
    if cheapest_cost <= 0:
        raise ValueError(f"cheapest worker cost must be positive, got {cheapest_cost}")
    return max(1, min_stations, z_ref // cheapest_cost)


@dataclass(frozen=True)
class StationWindows:
    """Earliest/latest admissible station index per task (1-based)."""

    earliest: tuple[int, ...]
    latest: tuple[int, ...]
    m_ub: int

    def window(self, task: int) -> tuple[int, int]:
        return self.earliest[task - 1], self.latest[task - 1]


def _longest_from_source(num_nodes: int, order, adj) -> list[int]:
    # adj: node -> list of (succ, weight); order must be topological
    dist = [0] * num_nodes
    for u in order:
        for v, w in adj[u]:
            if dist[u] + w > dist[v]:
                dist[v] = dist[u] + w
    return dist


def compute_station_windows(
    inst: Instance, bounds: ArcBounds, m_ub: int
) -> StationWindows:
    """Critical-path station windows over the weighted auxiliary DAG.

    A dummy source 0 feeds all tasks without predecessors and a dummy sink
    n+1 drains all tasks without successors (weight-0 arcs); every arc
    bound becomes a weighted arc. The earliest station is one plus the
    longest source-to-task path; the latest is m_ub minus the longest
    task-to-sink path, computed on the transpose graph.

    Raises WindowInfeasibleError when some window is empty, which proves
    that no solution with at most m_ub stations exists.
    """
    n = inst.num_tasks
    clos = compute_closures(inst)
    source, sink = 0, n + 1
    adj = [[] for _ in range(n + 2)]
    radj = [[] for _ in range(n + 2)]

    def add(u, v, w):
        adj[u].append((v, w))
        radj[v].append((u, w))

    for (i, j), lb in bounds.items():
        add(i, j, lb)
    for i in inst.tasks():
        if not clos.pred(i):
            add(source, i, 0)
        if not clos.succ(i):
            add(i, sink, 0)

    from .core import topological_order

    task_order = topological_order(n, inst.precedence)
    order = [source] + task_order + [sink]
    dist = _longest_from_source(n + 2, order, adj)
    rdist = _longest_from_source(n + 2, list(reversed(order)), radj)

    earliest = tuple(1 + dist[i] for i in inst.tasks())
    latest = tuple(m_ub - rdist[i] for i in inst.tasks())
    for i in inst.tasks():
        if earliest[i - 1] > latest[i - 1]:
            raise WindowInfeasibleError(i, earliest[i - 1], latest[i - 1])
    return StationWindows(earliest=earliest, latest=latest, m_ub=m_ub)


MAX_CARDINALITY = "max-cardinality"
MAX_WEIGHT = "max-weight"


def solve_conflict_knapsack(
    weights,
    capacity: int,
    conflicts,
    mode: str,
) -> tuple[int, frozenset[int]]:
    """Exact 0-1 knapsack with pairwise conflicts.

    Items are positions into ``weights``. No two conflicting items may
    both be chosen and the chosen weights must fit ``capacity``. Mode
    ``max-cardinality`` maximizes the number of chosen items, ``max-weight``
    their total weight. Solved by depth-first branch and bound with a
    fractional-relaxation bound; exactness, not speed, is the contract.
    """
    if mode not in (MAX_CARDINALITY, MAX_WEIGHT):
        raise ValueError(f"unknown mode {mode!r}")
    if capacity < 0:
        raise ValueError("capacity must be nonnegative")
    items = list(range(len(weights)))
    for w in weights:
        if w < 0:
            raise ValueError("weights must be nonnegative")
    enemies = {i: set() for i in items}
    for a, b in conflicts:
        if a not in enemies or b not in enemies:
            raise ValueError(f"conflict ({a},{b}) references unknown item")
        enemies[a].add(b)
        enemies[b].add(a)

    # order small-first: best for the cardinality bound and fine for weight
    order = sorted(items, key=lambda i: (weights[i], i))
    total_weight = sum(weights)
    best_val = 0
    best_set: frozenset[int] = frozenset()

    def relax(pos: int, blocked: set[int], used: int) -> int:
        # optimistic value of the remaining suffix, ignoring conflicts
        room = capacity - used
        if mode == MAX_WEIGHT:
            free = sum(weights[order[k]] for k in range(pos, len(order))
                       if order[k] not in blocked)
            return min(room, free)
        count = 0
        for k in range(pos, len(order)):
            i = order[k]
            if i in blocked:
                continue
            if weights[i] > room:
                break
            room -= weights[i]
            count += 1
        return count

    def dfs(pos: int, chosen: list[int], blocked: set[int], used: int, val: int):
        nonlocal best_val, best_set
        if val > best_val:
            best_val = val
            best_set = frozenset(chosen)
        ceiling = min(capacity, total_weight) if mode == MAX_WEIGHT else len(items)
        if best_val >= ceiling or pos == len(order):
            return
        if val + relax(pos, blocked, used) <= best_val:
            return
        i = order[pos]
        if i not in blocked and used + weights[i] <= capacity:
            newly = enemies[i] - blocked
            chosen.append(i)
            dfs(pos + 1, chosen, blocked | newly, used + weights[i],
                val + (weights[i] if mode == MAX_WEIGHT else 1))
            chosen.pop()
        dfs(pos + 1, chosen, blocked, used, val)

    dfs(0, [], set(), 0, 0)
    return best_val, best_set


def _conflict_pairs(bounds: ArcBounds, items: list[int]) -> list[tuple[int, int]]:
    # positions into items whose tasks cannot share a station
    index = {task: p for p, task in enumerate(items)}
    pairs = []
    for (a, b), lb in bounds.items():
        if lb > 0 and a in index and b in index:
            pairs.append((index[a], index[b]))
    return pairs


def compute_M(inst: Instance, bounds: ArcBounds) -> tuple[int, ...]:
    """Per-type cap on the number of tasks a single station can hold.

    For each worker type h: the largest set of h-executable tasks that
    fits the cycle time with no pair forced apart by a positive arc bound.
    Clamped to at least 1 so the cap stays a usable big-M.
    """
    caps = []
    for h in inst.types():
        items = [i for i in inst.tasks() if h <= inst.task_type(i)]
        weights = [inst.time(i, h) for i in items]
        val, _ = solve_conflict_knapsack(
            weights, inst.cycle_time, _conflict_pairs(bounds, items), MAX_CARDINALITY
        )
        caps.append(max(1, val))
    return tuple(caps)


def compute_lifted_times(
    inst: Instance, bounds: ArcBounds
) -> tuple[tuple[int | None, ...], ...]:
    """Inflated execution times, valid in every station capacity constraint.

    For a finite (i, h) entry, the best complementary load is the largest
    total time of other h-executable tasks fitting the residual capacity
    C - t_ih without conflicting pairs. The time is inflated to C minus
    that load only when the complement is smaller than t_ih itself: then
    at most one inflated task can appear in any feasible station, which
    keeps the inflated load sum within C for every station that was
    feasible under the original times. Unconditional inflation is unsound
    (several mutually compatible tasks could all be inflated past their
    joint fit), so the inflation is gated on that dominance condition.
    """
    cap = inst.cycle_time
    lifted = []
    for i in inst.tasks():
        row = []
        for h in inst.types():
            t = inst.time(i, h)
            if t is None:
                row.append(None)
                continue
            others = [j for j in inst.tasks() if j != i and h <= inst.task_type(j)]
            weights = [inst.time(j, h) for j in others]
            delta, _ = solve_conflict_knapsack(
                weights, cap - t, _conflict_pairs(bounds, others), MAX_WEIGHT
            )
            row.append(cap - delta if delta < t else t)
        lifted.append(tuple(row))
    return tuple(lifted)


def compute_z1_lb(inst: Instance) -> int:
    """Floor on the number of type-1 workers: tasks executable only by
    type 1 must fit on type-1 stations."""
    total = sum(inst.time(i, 1) for i in inst.tasks() if inst.task_type(i) == 1)
    return math.ceil(total / inst.cycle_time)


@dataclass(frozen=True)
class PreprocessInfo:
    """Everything the strengthened model builder needs."""

    closures: Closures
    arc_bounds: ArcBounds
    windows: StationWindows
    max_tasks: tuple[int, ...]
    lifted_times: tuple[tuple[int | None, ...], ...]
    z1_lb: int

    @property
    def m_ub(self) -> int:
        return self.windows.m_ub


def preprocess_instance(
    inst: Instance, z_ref: int | None = None, min_stations: int = 1
) -> PreprocessInfo:
    """Run the full tightening pipeline.

    ``z_ref`` is the cost of a known feasible solution (normally the VND
    result); without one the fallback m_ub = n keeps the model buildable.
    The bound is additionally clamped to n, since n singleton stations
    always suffice.
    """
    clos = compute_closures(inst)
    bounds = compute_arc_bounds(inst, clos)
    if z_ref is None:
        m_ub = inst.num_tasks
    else:
        m_ub = min(
            compute_m_ub(z_ref, inst.costs[-1], min_stations), inst.num_tasks
        )
    windows = compute_station_windows(inst, bounds, m_ub)
    return PreprocessInfo(
        closures=clos,
        arc_bounds=bounds,
        windows=windows,
        max_tasks=compute_M(inst, bounds),
        lifted_times=compute_lifted_times(inst, bounds),
        z1_lb=compute_z1_lb(inst),
    )


def dump_arc_bounds(bounds: ArcBounds) -> str:
    """Tab-separated debug dump, one '(i, j, bound)' row per arc."""
    lines = ["i\tj\tlb"]
    for (i, j), lb in sorted(bounds.items()):
        lines.append(f"{i}\t{j}\t{lb}")
    return "\n".join(lines) + "\n"


def dump_station_windows(windows: StationWindows) -> str:
    lines = [f"m_ub\t{windows.m_ub}", "task\tearliest\tlatest"]
    for idx, (e, latest) in enumerate(zip(windows.earliest, windows.latest), start=1):
        lines.append(f"{idx}\t{e}\t{latest}")
    return "\n".join(lines) + "\n"
