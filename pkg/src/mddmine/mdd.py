"""Layered decision-diagram encoding of a sequence database.

Layer j (1-based) holds one node per distinct item occurring at position j in
any sequence, so nodes are shared across sequences while labels keep per-
sequence identity: a node stores, per sequence id, the attribute values of
that sequence's event at this position.  Arcs connect an event to every later
event of the same sequence that is a feasible next pattern step under the
imposed pairwise rules (gap bounds, allowed item set); arcs may skip layers.
A virtual root precedes layer 1 and a virtual terminal follows the last
layer: the root reaches every event that may start a pattern and every live
event reaches the terminal.

Construction runs backward over each sequence (last position first) so that
node-information propagation can consume finalized successor data.  Mining
never touches the node/arc objects; it walks the compact per-sequence
successor tables (`succ`, `starts`), and the object graph is materialized
lazily for validation and DOT export.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence as SequenceT

from .constraints import ConstraintSpec, imposable, pairwise_rules, require_known_attributes
from .seqdb import AttributedDatabase

ROOT_ITEM = -1
TERMINAL_ITEM = -2


class MddNode:
    __slots__ = ("layer", "item", "labels", "out_arcs")

    def __init__(self, layer: int, item: int):
        self.layer = layer
        self.item = item
        #: sid -> attribute value tuple, aligned with the database attribute names
        self.labels: dict[int, tuple[int, ...]] = {}
        self.out_arcs: list[Arc] = []

    @property
    def sids(self) -> set[int]:
        return set(self.labels)

    def __repr__(self) -> str:
        return f"MddNode({self.item}@{self.layer})"


class Arc:
    __slots__ = ("source", "target", "sids")

    def __init__(self, source: MddNode, target: MddNode):
        self.source = source
        self.target = target
        self.sids: set[int] = set()

    def __repr__(self) -> str:
        return f"Arc({self.source!r}->{self.target!r}, sids={sorted(self.sids)})"


class Mdd:
    """Immutable diagram over a fixed database; see module docstring."""

    def __init__(
        self,
        n_layers: int,
        n_sequences: int,
        imposed: tuple[ConstraintSpec, ...],
    ):
        self.n_layers = n_layers
        self.n_sequences = n_sequences
        self.imposed = imposed
        self.root = MddNode(0, ROOT_ITEM)
        self.terminal = MddNode(n_layers + 1, TERMINAL_ITEM)
        self._nodes: dict[tuple[int, int], MddNode] = {}
        #: per sequence index: tuple over 0-based positions of successor tuples
        self.succ: list[tuple[tuple[int, ...], ...]] = []
        #: per sequence index: positions whose events may start a pattern
        self.starts: list[tuple[int, ...]] = []
        #: per sequence index: positions whose events are live (reach terminal)
        self.alive: list[tuple[bool, ...]] = []
        self._items: list[tuple[int, ...]] = []
        self._arcs_built = False

    # -- structure accessors --

    def node(self, layer: int, item: int) -> MddNode | None:
        return self._nodes.get((layer, item))

    def node_for_event(self, sid: int, pos: int) -> MddNode:
        """Node holding (sid, 0-based pos); unique by construction."""
        return self._nodes[(pos + 1, self._items[sid - 1][pos])]

    def layer_nodes(self, layer: int) -> list[MddNode]:
        nodes = [n for (lay, _), n in self._nodes.items() if lay == layer]
        return sorted(nodes, key=lambda n: n.item)

    def layer_sizes(self) -> list[int]:
        sizes = [0] * self.n_layers
        for layer, _ in self._nodes:
            sizes[layer - 1] += 1
        return sizes

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    # -- internal build helpers --

    def _ensure_node(self, layer: int, item: int) -> MddNode:
        node = self._nodes.get((layer, item))
        if node is None:
            node = MddNode(layer, item)
            self._nodes[(layer, item)] = node
        return node

    def ensure_arcs(self) -> None:
        """Materialize the node/arc object graph from the successor tables."""
        if self._arcs_built:
            return
        by_pair: dict[tuple[MddNode, MddNode], Arc] = {}

        def label(source: MddNode, target: MddNode, sid: int) -> None:
            arc = by_pair.get((source, target))
            if arc is None:
                arc = Arc(source, target)
                by_pair[(source, target)] = arc
                source.out_arcs.append(arc)
            arc.sids.add(sid)

        for si, items in enumerate(self._items):
            sid = si + 1
            nodes = [self._nodes[(pos + 1, item)] for pos, item in enumerate(items)]
            for pos in self.starts[si]:
                label(self.root, nodes[pos], sid)
            for pos, nexts in enumerate(self.succ[si]):
                for nxt in nexts:
                    label(nodes[pos], nodes[nxt], sid)
            for pos, live in enumerate(self.alive[si]):
                if live:
                    label(nodes[pos], self.terminal, sid)
        for node in self._nodes.values():
            node.out_arcs.sort(key=lambda a: (a.target.layer, a.target.item))
        self.root.out_arcs.sort(key=lambda a: (a.target.layer, a.target.item))
        self._arcs_built = True


def build_mdd(db: AttributedDatabase, specs: SequenceT[ConstraintSpec] = ()) -> Mdd:
    """Encode the database, imposing the pairwise-checkable specs as arc rules.

    Only gap and item_set specs shape the arc set; every other constraint is
    ignored here and handled by node information or by the miner.  For a gap
    upper bound on the ordering attribute, the scan over later positions stops
    at the first violation since the deltas can only grow.
    """
    require_known_attributes(specs, db.attribute_names)
    rules = pairwise_rules(specs)
    imposed = imposable(specs)
    n_layers = max((len(seq) for seq in db.sequences), default=0)
    mdd = Mdd(n_layers, len(db.sequences), imposed)
    names = db.attribute_names
    gap_attrs = [attr for attr, _, _ in rules.gap_bounds]
    ordering = db.ordering_attribute
    ord_hi: int | None = None
    for attr, _, hi in rules.gap_bounds:
        if attr == ordering and hi is not None:
            ord_hi = hi

    for seq in db.sequences:
        sid = seq.sid
        items = seq.items
        mdd._items.append(items)
        length = len(items)
        cols = {attr: seq.attr_values(attr) for attr in gap_attrs}
        ord_col = cols.get(ordering) if ordering is not None else None
        alive = tuple(rules.item_ok(item) for item in items)
        succ_rows: list[tuple[int, ...]] = [()] * length
        for j in range(length - 1, -1, -1):
            node = mdd._ensure_node(j + 1, items[j])
            node.labels[sid] = tuple(seq.events[j].attrs[name] for name in names)
            if not alive[j]:
                continue
            nexts: list[int] = []
            for k in range(j + 1, length):
                if ord_hi is not None and ord_col[k] - ord_col[j] > ord_hi:
                    break  # ordering attribute is increasing; later gaps only grow
                if not alive[k]:
                    continue
                ok = True
                for attr, lo, hi in rules.gap_bounds:
                    delta = cols[attr][k] - cols[attr][j]
                    if (lo is not None and delta < lo) or (hi is not None and delta > hi):
                        ok = False
                        break
                if ok:
                    nexts.append(k)
            succ_rows[j] = tuple(nexts)
        mdd.succ.append(tuple(succ_rows))
        mdd.starts.append(tuple(j for j in range(length) if alive[j]))
        mdd.alive.append(alive)
    return mdd


# --- validation ----------------------------------------------------------------

@dataclass
class MddValidationReport:
    ok: bool = True
    problems: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.ok = False
        self.problems.append(message)

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise AssertionError("; ".join(self.problems))


def validate(mdd: Mdd, db: AttributedDatabase) -> MddValidationReport:
    """Check every structural invariant of the diagram against the database."""
    report = MddValidationReport()
    expected = build_mdd(db, mdd.imposed)

    # node set: one node per (layer, distinct item at that position)
    expected_keys = set()
    for seq in db.sequences:
        for pos, item in enumerate(seq.items):
            expected_keys.add((pos + 1, item))
    actual_keys = set(mdd._nodes)
    for key in expected_keys - actual_keys:
        report.fail(f"missing node {key[1]}@{key[0]}")
    for key in actual_keys - expected_keys:
        report.fail(f"spurious node {key[1]}@{key[0]}")

    # labels: every event sits in exactly the node of its (position, item)
    names = db.attribute_names
    for seq in db.sequences:
        for pos, event in enumerate(seq.events):
            node = mdd.node(pos + 1, event.item)
            if node is None:
                continue
            attrs = tuple(event.attrs[name] for name in names)
            if node.labels.get(seq.sid) != attrs:
                report.fail(
                    f"node {event.item}@{pos + 1} lacks label for sid {seq.sid}"
                )
    for (layer, item), node in mdd._nodes.items():
        if not node.labels:
            report.fail(f"node {item}@{layer} has an empty label set")

    # successor tables must match a fresh build under the same imposed specs
    if mdd.succ != expected.succ:
        for si in range(min(len(mdd.succ), len(expected.succ))):
            if mdd.succ[si] != expected.succ[si]:
                report.fail(f"successor table differs for sid {si + 1}")
    if mdd.starts != expected.starts:
        report.fail("root start positions differ from the imposed rules")

    # object graph consistency
    mdd.ensure_arcs()
    seen_pairs = set()
    for node in list(mdd._nodes.values()) + [mdd.root]:
        for arc in node.out_arcs:
            if arc.target is not mdd.terminal and arc.target.layer <= node.layer:
                report.fail(f"arc {arc!r} does not advance layers")
            pair = (id(node), id(arc.target))
            if pair in seen_pairs:
                report.fail(f"duplicate arc object {arc!r}")
            seen_pairs.add(pair)
            if node is not mdd.root:
                bad = arc.sids - set(node.labels)
                if bad:
                    report.fail(f"arc {arc!r} labeled with sids {sorted(bad)} "
                                "missing on its source")
            if arc.target is not mdd.terminal:
                bad = arc.sids - set(arc.target.labels)
                if bad:
                    report.fail(f"arc {arc!r} labeled with sids {sorted(bad)} "
                                "missing on its target")

    if not mdd.imposed:
        _validate_unconstrained(mdd, db, report)
    return report


def _validate_unconstrained(mdd: Mdd, db: AttributedDatabase, report: MddValidationReport):
    for si, seq in enumerate(db.sequences):
        length = len(seq)
        for j in range(length):
            expected_next = tuple(range(j + 1, length))
            if mdd.succ[si][j] != expected_next:
                report.fail(f"sid {seq.sid}: position {j + 1} lacks complete "
                            "forward reachability")
        if mdd.starts[si] != tuple(range(length)):
            report.fail(f"sid {seq.sid}: not every event can start a pattern")
        # replay along consecutive positions reconstructs the sequence
        replayed = []
        for pos in range(length):
            node = mdd.node(pos + 1, seq.items[pos])
            if node is None or seq.sid not in node.labels:
                report.fail(f"sid {seq.sid}: replay broken at position {pos + 1}")
                break
            if pos + 1 < length and pos + 1 not in mdd.succ[si][pos]:
                report.fail(f"sid {seq.sid}: consecutive arc {pos + 1}->{pos + 2} missing")
                break
            replayed.append(node.item)
        else:
            if tuple(replayed) != seq.items:
                report.fail(f"sid {seq.sid}: replay does not reconstruct the sequence")


# --- DOT export ----------------------------------------------------------------

def export_dot(mdd: Mdd) -> str:
    """Deterministic DOT rendering: solid consecutive arcs, dashed skip arcs."""
    mdd.ensure_arcs()
    lines = ["digraph mdd {", "  rankdir=LR;", '  r [label="r"];']
    for layer in range(1, mdd.n_layers + 1):
        for node in mdd.layer_nodes(layer):
            lines.append(f'  n{layer}_{node.item} [label="{node.item}@{layer}"];')
    lines.append('  t [label="t"];')

    def name(node: MddNode) -> str:
        if node is mdd.root:
            return "r"
        if node is mdd.terminal:
            return "t"
        return f"n{node.layer}_{node.item}"

    for node in [mdd.root] + [n for ly in range(1, mdd.n_layers + 1)
                              for n in mdd.layer_nodes(ly)]:
        for arc in node.out_arcs:
            sids = ",".join(str(s) for s in sorted(arc.sids))
            skip = (node is not mdd.root and arc.target is not mdd.terminal
                    and arc.target.layer > node.layer + 1)
            style = ", style=dashed" if skip else ""
            lines.append(f'  {name(node)} -> {name(arc.target)} [label="{sids}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
