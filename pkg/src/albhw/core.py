"""Core domain model for assembly line balancing with hierarchical workers.

An instance couples a task precedence DAG with per-worker-type execution
times and per-type worker costs. Worker types are ranked: type 1 is the
most qualified (fastest, most expensive) and type ``num_types`` the least.
A task ``i`` may only be executed by worker types ``h <= task_type(i)``.
A solution is an ordered list of stations, each staffed by exactly one
worker type and holding a set of tasks; its cost is the sum of the staffed
workers' costs.
"""

from __future__ import annotations

from dataclasses import dataclass


class InstanceError(ValueError):
    """Malformed instance text or violated instance invariant."""


class SolutionFormatError(ValueError):
    """Malformed solution text."""


def topological_order(num_tasks: int, arcs) -> list[int]:
    """Return a topological order of tasks 1..num_tasks, or raise on a cycle."""
    succ = {i: [] for i in range(1, num_tasks + 1)}
    indeg = {i: 0 for i in range(1, num_tasks + 1)}
    for a, b in arcs:
        succ[a].append(b)
        indeg[b] += 1
    ready = sorted(i for i in indeg if indeg[i] == 0)
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        fresh = []
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                fresh.append(j)
        # keep deterministic ascending processing order
        ready = sorted(ready + fresh)
    if len(order) != num_tasks:
        stuck = sorted(i for i in indeg if indeg[i] > 0)
        raise InstanceError(f"precedence graph has a cycle through tasks {stuck}")
    return order


@dataclass(frozen=True)
class Instance:
    """Immutable problem data. Task and worker-type indices are 1-based.

    ``times[i-1][h-1]`` is the execution time of task ``i`` under worker
    type ``h``; ``None`` marks "cannot execute" (encoded as -1 in files,
    never as a large number, so load sums cannot overflow).
    """

    num_tasks: int
    num_types: int
    cycle_time: int
    costs: tuple[int, ...]
    task_types: tuple[int, ...]
    times: tuple[tuple[int | None, ...], ...]
    precedence: tuple[tuple[int, int], ...]

    def tasks(self) -> range:
        return range(1, self.num_tasks + 1)

    def types(self) -> range:
        return range(1, self.num_types + 1)

    def time(self, task: int, wtype: int) -> int | None:
        return self.times[task - 1][wtype - 1]

    def cost(self, wtype: int) -> int:
        return self.costs[wtype - 1]

    def task_type(self, task: int) -> int:
        return self.task_types[task - 1]

    def eligible_types(self, task: int) -> range:
        """Worker types allowed to execute ``task`` (1..task_type)."""
        return range(1, self.task_types[task - 1] + 1)


def validate_instance(inst: Instance) -> None:
    """Check every instance invariant; raise InstanceError naming the breach."""
    n, l = inst.num_tasks, inst.num_types
    if n < 1 or l < 1:
        raise InstanceError("need at least one task and one worker type")
    if inst.cycle_time < 1:
        raise InstanceError("cycle time must be positive")
    if len(inst.costs) != l or len(inst.task_types) != n or len(inst.times) != n:
        raise InstanceError("cost/type/time table sizes do not match n and l")
    for h in range(1, l + 1):
        if inst.costs[h - 1] < 0:
            raise InstanceError(f"worker type {h}: negative cost")
        if h < l and inst.costs[h - 1] < inst.costs[h]:
            raise InstanceError(
                f"worker costs must be nonincreasing in type: c_{h} < c_{h + 1}"
            )
    for i in inst.tasks():
        k = inst.task_types[i - 1]
        if not 1 <= k <= l:
            raise InstanceError(f"task {i}: task type {k} outside 1..{l}")
        row = inst.times[i - 1]
        if len(row) != l:
            raise InstanceError(f"task {i}: time row has {len(row)} entries, want {l}")
        for h in range(1, l + 1):
            t = row[h - 1]
            if h <= k:
                if t is None:
                    raise InstanceError(
                        f"task {i} type {h}: time marked infeasible but h <= k_i"
                    )
                if t < 0:
                    raise InstanceError(f"task {i} type {h}: negative time")
            elif t is not None:
                raise InstanceError(
                    f"task {i} type {h}: expected infeasible time for h > k_i"
                )
        for h in range(1, k):
            if row[h - 1] > row[h]:
                raise InstanceError(
                    f"task {i}: times must be nondecreasing in type "
                    f"(t_{h} > t_{h + 1})"
                )
        if row[0] > inst.cycle_time:
            raise InstanceError(
                f"task {i} exceeds cycle time even at type 1 "
                f"({row[0]} > {inst.cycle_time})"
            )
    for a, b in inst.precedence:
        if not (1 <= a <= n and 1 <= b <= n):
            raise InstanceError(f"precedence arc ({a},{b}) references unknown task")
        if a == b:
            raise InstanceError(f"precedence arc ({a},{a}) is a self-loop")
    topological_order(n, inst.precedence)


def _data_rows(text: str) -> list[list[str]]:
    # '#' starts a comment; blank lines are skipped
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def _ints(row: list[str], what: str) -> list[int]:
    try:
        return [int(tok) for tok in row]
    except ValueError:
        raise InstanceError(f"{what}: expected integers, got {' '.join(row)}") from None


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    Layout: ``n l C`` / costs / task types / n time rows (-1 = infeasible) /
    arc count / arcs. ``#`` comments and blank lines are ignored.
    """
    rows = _data_rows(text)
    if not rows:
        raise InstanceError("empty instance file")
    pos = 0

    def take(what: str) -> list[str]:
        nonlocal pos
        if pos >= len(rows):
            raise InstanceError(f"unexpected end of file while reading {what}")
        row = rows[pos]
        pos += 1
        return row

    head = _ints(take("header"), "header")
    if len(head) != 3:
        raise InstanceError("header must be 'n l C'")
    n, l, cycle = head
    if n < 1 or l < 1:
        raise InstanceError("need at least one task and one worker type")
    costs = _ints(take("costs"), "cost line")
    if len(costs) != l:
        raise InstanceError(f"cost line has {len(costs)} entries, want {l}")
    ktypes = _ints(take("task types"), "task type line")
    if len(ktypes) != n:
        raise InstanceError(f"task type line has {len(ktypes)} entries, want {n}")
    times = []
    for i in range(1, n + 1):
        row = _ints(take(f"time row {i}"), f"time row {i}")
        if len(row) != l:
            raise InstanceError(f"time row {i} has {len(row)} entries, want {l}")
        times.append(tuple(None if t == -1 else t for t in row))
    (p,) = _ints(take("arc count"), "arc count") or [0]
    arcs = []
    for a in range(p):
        pair = _ints(take(f"arc {a + 1}"), f"arc {a + 1}")
        if len(pair) != 2:
            raise InstanceError(f"arc {a + 1}: expected 'i j'")
        arcs.append((pair[0], pair[1]))
    if pos != len(rows):
        raise InstanceError("trailing data after the arc list")

    inst = Instance(
        num_tasks=n,
        num_types=l,
        cycle_time=cycle,
        costs=tuple(costs),
        task_types=tuple(ktypes),
        times=tuple(times),
        precedence=tuple(arcs),
    )
    validate_instance(inst)
    return inst


def serialize_instance(inst: Instance) -> str:
    lines = [f"{inst.num_tasks} {inst.num_types} {inst.cycle_time}"]
    lines.append(" ".join(str(c) for c in inst.costs))
    lines.append(" ".join(str(k) for k in inst.task_types))
    for row in inst.times:
        lines.append(" ".join("-1" if t is None else str(t) for t in row))
    lines.append(str(len(inst.precedence)))
    for a, b in inst.precedence:
        lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Closures:
    """Direct and transitive predecessor/successor sets, per task."""

    direct_pred: tuple[frozenset[int], ...]
    direct_succ: tuple[frozenset[int], ...]
    trans_pred: tuple[frozenset[int], ...]
    trans_succ: tuple[frozenset[int], ...]

    def pred(self, task: int) -> frozenset[int]:
        return self.direct_pred[task - 1]

    def succ(self, task: int) -> frozenset[int]:
        return self.direct_succ[task - 1]

    def pred_star(self, task: int) -> frozenset[int]:
        return self.trans_pred[task - 1]

    def succ_star(self, task: int) -> frozenset[int]:
        return self.trans_succ[task - 1]


def compute_closures(inst: Instance) -> Closures:
    """Compute exact direct and transitive predecessor/successor sets."""
    n = inst.num_tasks
    dpred = [set() for _ in range(n)]
    dsucc = [set() for _ in range(n)]
    for a, b in inst.precedence:
        dsucc[a - 1].add(b)
        dpred[b - 1].add(a)
    order = topological_order(n, inst.precedence)
    tsucc = [set() for _ in range(n)]
    for i in reversed(order):
        acc = set()
        for j in dsucc[i - 1]:
            acc.add(j)
            acc |= tsucc[j - 1]
        tsucc[i - 1] = acc
    tpred = [set() for _ in range(n)]
    for i in order:
        acc = set()
        for j in dpred[i - 1]:
            acc.add(j)
            acc |= tpred[j - 1]
        tpred[i - 1] = acc
    return Closures(
        direct_pred=tuple(frozenset(s) for s in dpred),
        direct_succ=tuple(frozenset(s) for s in dsucc),
        trans_pred=tuple(frozenset(s) for s in tpred),
        trans_succ=tuple(frozenset(s) for s in tsucc),
    )


@dataclass(frozen=True)
class Station:
    worker_type: int
    tasks: tuple[int, ...]


@dataclass(frozen=True)
class Solution:
    """Ordered stations; the station index is the 1-based list position."""

    stations: tuple[Station, ...]

    def station_of(self) -> dict[int, int]:
        """Map each task to its 1-based station index."""
        where = {}
        for s, st in enumerate(self.stations, start=1):
            for i in st.tasks:
                where.setdefault(i, s)
        return where

    def num_stations(self) -> int:
        return len(self.stations)


def _check_indices(inst: Instance, sol: Solution) -> None:
    for st in sol.stations:
        if not 1 <= st.worker_type <= inst.num_types:
            raise ValueError(f"unknown worker type {st.worker_type}")
        for i in st.tasks:
            if not 1 <= i <= inst.num_tasks:
                raise ValueError(f"unknown task index {i}")


def evaluate(inst: Instance, sol: Solution) -> int:
    """Total worker cost of the solution. Does not check feasibility."""
    _check_indices(inst, sol)
    return sum(inst.cost(st.worker_type) for st in sol.stations)


def station_load(inst: Instance, station: Station) -> int | None:
    """Total time of the station under its worker, None if some task is
    not executable by that worker type."""
    total = 0
    for i in station.tasks:
        t = inst.time(i, station.worker_type)
        if t is None:
            return None
        total += t
    return total


@dataclass(frozen=True)
class Violation:
    kind: str  # assignment | qualification | cycle_time | precedence
    message: str
    task: int | None = None
    station: int | None = None


def check_feasibility(inst: Instance, sol: Solution) -> list[Violation]:
    """Collect every constraint breach (empty list means feasible).

    Violations are gathered exhaustively rather than fail-fast so callers
    can produce a full diagnostic report.
    """
    _check_indices(inst, sol)
    out = []
    seen: dict[int, int] = {}
    for s, st in enumerate(sol.stations, start=1):
        if not st.tasks:
            out.append(Violation("assignment", f"station {s} is empty", station=s))
        for i in st.tasks:
            if i in seen:
                out.append(
                    Violation(
                        "assignment",
                        f"task {i} assigned to stations {seen[i]} and {s}",
                        task=i,
                        station=s,
                    )
                )
            else:
                seen[i] = s
    for i in inst.tasks():
        if i not in seen:
            out.append(Violation("assignment", f"task {i} is not assigned", task=i))
    for s, st in enumerate(sol.stations, start=1):
        load = 0
        loadable = True
        for i in st.tasks:
            t = inst.time(i, st.worker_type)
            if t is None:
                out.append(
                    Violation(
                        "qualification",
                        f"task {i} (type {inst.task_type(i)}) cannot be executed "
                        f"by worker type {st.worker_type} at station {s}",
                        task=i,
                        station=s,
                    )
                )
                loadable = False
            else:
                load += t
        if loadable and load > inst.cycle_time:
            out.append(
                Violation(
                    "cycle_time",
                    f"station {s} load {load} exceeds cycle time {inst.cycle_time}",
                    station=s,
                )
            )
    for a, b in inst.precedence:
        if a in seen and b in seen and seen[a] > seen[b]:
            out.append(
                Violation(
                    "precedence",
                    f"arc ({a},{b}) violated: station {seen[a]} > {seen[b]}",
                    task=a,
                )
            )
    return out


def parse_solution(text: str) -> Solution:
    """Parse the solution format: 'station_count cost' then one
    'worker_type task...' line per station."""
    rows = _data_rows(text)
    if not rows:
        raise SolutionFormatError("empty solution file")
    head = rows[0]
    if len(head) != 2:
        raise SolutionFormatError("first line must be 'station_count cost'")
    try:
        count = int(head[0])
        int(head[1])
    except ValueError:
        raise SolutionFormatError("first line must be 'station_count cost'") from None
    if len(rows) - 1 != count:
        raise SolutionFormatError(
            f"expected {count} station lines, found {len(rows) - 1}"
        )
    stations = []
    for row in rows[1:]:
        try:
            vals = [int(tok) for tok in row]
        except ValueError:
            raise SolutionFormatError(f"bad station line: {' '.join(row)}") from None
        if not vals:
            raise SolutionFormatError("station line missing worker type")
        stations.append(Station(worker_type=vals[0], tasks=tuple(vals[1:])))
    return Solution(stations=tuple(stations))


def serialize_solution(inst: Instance, sol: Solution) -> str:
    lines = [f"{sol.num_stations()} {evaluate(inst, sol)}"]
    for st in sol.stations:
        lines.append(" ".join(str(v) for v in (st.worker_type, *st.tasks)))
    return "\n".join(lines) + "\n"
