"""Walkthrough: mining under constraints, and why all occurrence endpoints
matter.

Run with:  python3 demos/02_constrained_mining.py
"""
from mddmine import (
    MiningCounters,
    build_mdd,
    make_database,
    mine,
    mine_bruteforce,
    mine_ppcc,
    parse_constraint,
    propagate,
)

db = make_database(
    [[2, 2], [2, 1, 2], [3, 3, 1]],
    attrs={
        "time": [[1, 3], [3, 8, 9], [2, 5, 8]],
        "price": [[5, 3], [3, 1, 3], [1, 2, 3]],
    },
    ordering_attribute="time",
)


def show(title, patterns):
    print(f"\n{title}")
    for p in patterns:
        print(f"  {' '.join(map(str, p.items))}  support {p.support}")


def mine_with(specs, theta):
    mdd = build_mdd(db, specs)
    store = propagate(mdd, db, specs)
    return mine(mdd, store, db, specs, theta)


# Unconstrained, support threshold 2: three patterns qualify.
show("no constraints, theta=2", mine_with((), 2))

# A minimum time gap of 3 kills the 2..2 pattern: its only embedding with a
# large enough gap lives in one sequence.
show("gap(time)>=3, theta=2", mine_with((parse_constraint("gap(time)>=3"),), 2))

# With a MAXIMUM gap the minimal occurrence of item 3 in sequence 3 (time 2)
# cannot reach item 1 (time 8), but the later occurrence (time 5) can.  The
# miner keeps every live endpoint per sequence, so 3 1 is still found.
specs = (parse_constraint("gap(time)<=3"),)
out = mine_with(specs, 1)
show("gap(time)<=3, theta=1", out)
assert (3, 1) in out

# Non-monotone constraints (sum, avg, med) cannot prune on violation alone: an
# occurrence with a bad average may extend into a good one.  The diagram's
# per-node information answers "can this still become feasible?" exactly.
specs = (parse_constraint("avg(price)>=3"),)
show("avg(price)>=3, theta=1", mine_with(specs, 1))

# Every miner agrees on every input; the slow ones exist to keep the fast one
# honest.
for specs, theta in [((), 2), ((parse_constraint("gap(time)<=3"),), 1)]:
    fast = mine_with(specs, theta)
    assert fast == mine_ppcc(db, specs, theta)
    assert fast == mine_bruteforce(db, specs, theta)
print("\nall miners agree")

# Candidate scanning abandons items that provably cannot reach the threshold
# anymore; the output is identical, the scan counter smaller.
mdd = build_mdd(db)
store = propagate(mdd, db, ())
on, off = MiningCounters(), MiningCounters()
with_prune = mine(mdd, store, db, (), 2, counters=on)
without_prune = mine(mdd, store, db, (), 2, use_prop5=False, counters=off)
assert with_prune.render() == without_prune.render()
print(f"scans with early abandonment: {on.scanned_sequences}, "
      f"without: {off.scanned_sequences}")
