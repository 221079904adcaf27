"""Depth-first constrained pattern mining by pseudo projection.

A projected database is a set of cursors into the diagram: per sequence, one
entry for every live occurrence endpoint of the current pattern, because
under gap-style constraints the minimal occurrence may be a dead end while a
later one still extends.  Entries carry the occurrence positions and the
O(1)-updatable statistics the feasibility checks need; entries agreeing on
endpoint and statistics are interchangeable and deduplicated.

Candidate items for extending a pattern are collected by scanning each live
entry's successors, sequence by sequence in ascending id order.  While
scanning, an item whose remaining attainable support provably falls below
the threshold is abandoned early (`prop5_prune`); this is a pure work saving
and never changes the mined output.  A pattern is emitted when enough
sequences own an occurrence that passes the reference evaluator for every
constraint; entries that are not witnesses yet stay in the projection in
case an extension completes them.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields
from typing import Iterable, Sequence as SequenceT

from .constraints import ConstraintSpec
from .mdd import Mdd, build_mdd
from .nodeinfo import FeasibilityChecker, InfoStore, StatPlan, propagate
from .seqdb import AttributedDatabase


@dataclass
class MiningCounters:
    nodes_visited: int = 0
    entries_created: int = 0
    scanned_sequences: int = 0
    constraint_checks: int = 0
    info_probes: int = 0
    patterns_emitted: int = 0
    peak_entries: int = 0

    def merge(self, other: "MiningCounters") -> None:
        for f in dataclass_fields(self):
            if f.name == "peak_entries":
                self.peak_entries = max(self.peak_entries, other.peak_entries)
            else:
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


def prop5_prune(n: int, sup_i: int, sup_p: int, theta: int) -> bool:
    """True when item i cannot become frequent in the current projection.

    n sequences have been searched so far and sup_i of them contained i; the
    projection spans sup_p sequences, so i can gain at most sup_p - n more.
    """
    return n - sup_i > sup_p - theta


@dataclass(frozen=True)
class Pattern:
    items: tuple[int, ...]
    support: int


class PatternSet:
    """Mined output: item tuples with supports, canonically ordered."""

    def __init__(self, pairs: Iterable[tuple[SequenceT[int], int]] = ()):
        self._support: dict[tuple[int, ...], int] = {
            tuple(items): support for items, support in pairs
        }

    def add(self, items: SequenceT[int], support: int) -> None:
        self._support[tuple(items)] = support

    def update(self, other: "PatternSet") -> None:
        self._support.update(other._support)

    def support(self, items: SequenceT[int]) -> int | None:
        return self._support.get(tuple(items))

    def __contains__(self, items) -> bool:
        return tuple(items) in self._support

    def __len__(self) -> int:
        return len(self._support)

    def __iter__(self):
        for items in sorted(self._support):
            yield Pattern(items, self._support[items])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PatternSet):
            return NotImplemented
        return self._support == other._support

    def __repr__(self) -> str:
        return f"PatternSet({sorted(self._support.items())!r})"

    def render(self) -> str:
        """One line per pattern: space-separated items, tab, ``#SUP: n``."""
        lines = [
            f"{' '.join(str(i) for i in p.items)}\t#SUP: {p.support}" for p in self
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def render_patterns(patterns: PatternSet) -> str:
    return patterns.render()


@dataclass
class ProjectedDb:
    """Entries per sequence id: (occurrence positions, running statistics)."""

    entries: dict[int, list[tuple[tuple[int, ...], tuple]]]

    @property
    def support(self) -> int:
        return len(self.entries)

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.entries.values())


class _ProjectionMiner:
    """Shared pseudo-projection skeleton; subclasses supply the step source."""

    def __init__(
        self,
        db: AttributedDatabase,
        specs: SequenceT[ConstraintSpec],
        theta: int,
        checker: FeasibilityChecker,
        counters: MiningCounters | None = None,
        use_prop5: bool = True,
    ):
        if theta < 1:
            raise ValueError("minimum support must be at least 1")
        self.db = db
        self.specs = tuple(specs)
        self.theta = theta
        self.checker = checker
        self.plan = checker.plan
        self.counters = counters if counters is not None else MiningCounters()
        self.use_prop5 = use_prop5
        self._items = [seq.items for seq in db.sequences]

    # -- hooks -------------------------------------------------------------

    def _start_positions(self, si: int) -> Iterable[int]:
        raise NotImplementedError

    def _next_positions(self, si: int, pos: int) -> Iterable[int]:
        raise NotImplementedError

    # -- candidate generation ----------------------------------------------

    def root_candidates(self) -> list[tuple[int, ProjectedDb]]:
        """Frequent single items with their projections."""
        per_sid = ((si, ((None, None),)) for si in range(len(self._items)))
        return self._scan_candidates(per_sid, len(self._items))

    def extend(self, pdb: ProjectedDb) -> list[tuple[int, ProjectedDb]]:
        """Candidate extension items with their projections, threshold-filtered."""
        per_sid = ((sid - 1, entries) for sid, entries in sorted(pdb.entries.items()))
        return self._scan_candidates(per_sid, pdb.support)

    def _scan_candidates(self, per_sid_parents, sup_p: int):
        theta = self.theta
        counters = self.counters
        plan = self.plan
        checker = self.checker
        candidates: dict[int, dict[int, list]] = {}
        item_support: dict[int, int] = {}
        dead: set[int] = set()
        n = 0
        for si, parents in per_sid_parents:
            n += 1
            items = self._items[si]
            fresh: dict[int, list] = {}
            seen: set = set()
            for positions, stats in parents:
                if positions is None:
                    nexts = self._start_positions(si)
                else:
                    if not checker.scan_gate(si, positions[-1], stats):
                        continue
                    nexts = self._next_positions(si, positions[-1])
                for nxt in nexts:
                    counters.nodes_visited += 1
                    item = items[nxt]
                    if item in dead:
                        continue
                    if positions is None:
                        new_positions = (nxt,)
                        new_stats = plan.initial(si, nxt)
                    else:
                        new_positions = positions + (nxt,)
                        new_stats = plan.extend(stats, si, positions[-1], nxt)
                    key = (nxt, new_stats)
                    if key in seen:
                        continue
                    seen.add(key)
                    if not checker.admit(si, nxt, new_stats, new_positions):
                        continue
                    fresh.setdefault(item, []).append((new_positions, new_stats))
                    counters.entries_created += 1
            for item in sorted(fresh):
                sup_i = item_support.get(item, 0) + 1
                if self.use_prop5 and prop5_prune(n, sup_i, sup_p, theta):
                    dead.add(item)
                    candidates.pop(item, None)
                    item_support.pop(item, None)
                    continue
                item_support[item] = sup_i
                candidates.setdefault(item, {})[si + 1] = fresh[item]
                counters.scanned_sequences += 1
        return [
            (item, ProjectedDb(candidates[item]))
            for item in sorted(candidates)
            if item_support[item] >= theta
        ]

    # -- emission and traversal ----------------------------------------------

    def _witness_support(self, pdb: ProjectedDb) -> int:
        """Sequences owning an occurrence that satisfies every constraint.

        Returns 0 as soon as the threshold is out of reach; the exact count
        matters only for emitted patterns.
        """
        witness = self.checker.witness
        count = 0
        left = pdb.support
        for sid, entries in pdb.entries.items():
            left -= 1
            si = sid - 1
            if any(witness(si, positions) for positions, _ in entries):
                count += 1
            if count + left < self.theta:
                return 0
        return count

    def mine_patterns(self) -> PatternSet:
        out = PatternSet()
        self._dfs(self.root_candidates(), out)
        return out

    def _dfs(self, base: list[tuple[int, ProjectedDb]], out: PatternSet) -> None:
        counters = self.counters
        stack: list[tuple[tuple[int, ...], ProjectedDb]] = []
        live = 0
        for item, pdb in reversed(base):
            stack.append(((item,), pdb))
            live += pdb.size
        counters.peak_entries = max(counters.peak_entries, live)
        while stack:
            items, pdb = stack.pop()
            live -= pdb.size
            support = self._witness_support(pdb)
            if support >= self.theta:
                out.add(items, support)
                counters.patterns_emitted += 1
            for item, child in reversed(self.extend(pdb)):
                stack.append((items + (item,), child))
                live += child.size
            counters.peak_entries = max(counters.peak_entries, live)


class MppMiner(_ProjectionMiner):
    """Prefix projection over the diagram's successor structure."""

    def __init__(
        self,
        mdd: Mdd,
        store: InfoStore | None,
        db: AttributedDatabase,
        specs: SequenceT[ConstraintSpec],
        theta: int,
        *,
        counters: MiningCounters | None = None,
        use_prop5: bool = True,
        prune_monotone: bool = True,
        med_observer=None,
    ):
        counters = counters if counters is not None else MiningCounters()
        plan = StatPlan(db, specs)
        checker = FeasibilityChecker(
            db, plan, store, counters,
            prune_monotone=prune_monotone, med_observer=med_observer,
        )
        super().__init__(db, specs, theta, checker, counters, use_prop5)
        self.mdd = mdd
        self.store = store

    def _start_positions(self, si: int) -> Iterable[int]:
        return self.mdd.starts[si]

    def _next_positions(self, si: int, pos: int) -> Iterable[int]:
        return self.mdd.succ[si][pos]


def mine(
    mdd: Mdd,
    store: InfoStore | None,
    db: AttributedDatabase,
    specs: SequenceT[ConstraintSpec],
    theta: int,
    *,
    use_prop5: bool = True,
    prune_monotone: bool = True,
    counters: MiningCounters | None = None,
    threads: int = 1,
    med_observer=None,
) -> PatternSet:
    """Mine all frequent constraint-satisfying patterns from a built diagram.

    The diagram must have been built with the pairwise-checkable subset of
    ``specs`` imposed.  With ``threads`` > 1 the subtree below each frequent
    item is mined by an independent task; the diagram, information store, and
    database are shared read-only and results merge canonically.
    """
    miner = MppMiner(
        mdd, store, db, specs, theta,
        counters=counters, use_prop5=use_prop5,
        prune_monotone=prune_monotone, med_observer=med_observer,
    )
    if threads <= 1:
        return miner.mine_patterns()

    out = PatternSet()
    base = miner.root_candidates()

    def mine_subtree(seed):
        local = MppMiner(
            mdd, store, db, specs, theta,
            use_prop5=use_prop5, prune_monotone=prune_monotone,
        )
        local_out = PatternSet()
        local._dfs([seed], local_out)
        return local_out, local.counters

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for sub_out, sub_counters in pool.map(mine_subtree, base):
            out.update(sub_out)
            miner.counters.merge(sub_counters)
    return out


def mine_mpp(
    db: AttributedDatabase,
    specs: SequenceT[ConstraintSpec],
    theta: int,
    *,
    pareto_median: bool = False,
    **options,
) -> PatternSet:
    """Convenience wrapper: build the diagram and its information, then mine."""
    mdd = build_mdd(db, specs)
    store = propagate(mdd, db, specs, pareto_median=pareto_median)
    return mine(mdd, store, db, specs, theta, **options)
