"""Deterministic tick-wide merge of concurrent blocks.

Transactions from all certified blocks are ordered by Kahn's algorithm, always
releasing the eligible transaction with the highest priority key
``(tip, -proposer rank, -t_da, tie_hash)``.  Transactions on dependency cycles,
with unresolvable dependencies, or downstream of either are rejected.  When
several proposers include the same logical transaction, the first copy in the
merge executes and the tip is split evenly across all copies.
"""

from __future__ import annotations

import hashlib
import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, TextIO

from .errors import (
    ConfigError,
    DomainError,
    DuplicateId,
    InconsistentDuplicateDeps,
    InconsistentDuplicateTips,
    MixedTimestampPresence,
    UnknownProposer,
)

Ranks = Mapping[str, int]


@dataclass(frozen=True)
class Tx:
    id: str
    logical_id: str
    tip: int
    proposer: str
    deps: frozenset = field(default_factory=frozenset)
    t_da: Optional[float] = None
    tie_hash: int = 0

    def __post_init__(self):
        if int(self.tip) != self.tip or self.tip < 0:
            raise DomainError(f"tip of {self.id} must be a nonnegative integer, got {self.tip}")
        if self.t_da is not None and not self.t_da >= 0:
            raise DomainError(f"t_da of {self.id} must be >= 0, got {self.t_da}")
        object.__setattr__(self, "deps", frozenset(self.deps))


def tie_hash(epoch_seed: bytes, sender: bytes, nonce: int) -> int:
    """Keyed 64-bit hash of ``sender || nonce``; stands in for a per-epoch VRF."""
    if not 0 <= nonce < 1 << 64:
        raise DomainError(f"nonce must fit in 64 bits, got {nonce}")
    if isinstance(epoch_seed, str):
        epoch_seed = epoch_seed.encode()
    if isinstance(sender, str):
        sender = sender.encode()
    if len(epoch_seed) > 64:
        epoch_seed = hashlib.blake2b(epoch_seed).digest()
    h = hashlib.blake2b(sender + nonce.to_bytes(8, "big"), key=epoch_seed, digest_size=8)
    return int.from_bytes(h.digest(), "big")


def priority_key(tx: Tx, ranks: Ranks, use_t_da: bool | None = None) -> tuple:
    """Sort key where *larger* means earlier.  ``use_t_da`` defaults to whether
    the transaction carries a timestamp."""
    if tx.proposer not in ranks:
        raise UnknownProposer(f"proposer {tx.proposer!r} of {tx.id} has no rank")
    if use_t_da is None:
        use_t_da = tx.t_da is not None
    if use_t_da:
        if tx.t_da is None:
            raise MixedTimestampPresence(f"{tx.id} lacks a timestamp")
        return (tx.tip, -ranks[tx.proposer], -tx.t_da, tx.tie_hash)
    return (tx.tip, -ranks[tx.proposer], tx.tie_hash)


def _heap_entry(tx: Tx, ranks: Ranks, use_t_da: bool, order_by: str) -> tuple:
    key = priority_key(tx, ranks, use_t_da)
    if order_by == "timestamp":
        # earliest timestamp first, then the usual key
        return (tx.t_da, tuple(-k for k in key), tx.id)
    return (tuple(-k for k in key), tx.id)


@dataclass
class MergeResult:
    order: list[str]
    copy_order: list[str]
    pruned: list[str]
    rejected_cycles: set[str]
    rejected_dependents: set[str]
    rejected_dangling: set[str]
    payouts: dict[str, int]
    burned: int
    executed: dict[str, str]
    duplicate_counts: dict[str, int]

    @property
    def rejected(self) -> set[str]:
        return self.rejected_cycles | self.rejected_dependents | self.rejected_dangling

    def position(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.order)}


def _validate(txs: list[Tx], ranks: Ranks) -> tuple[dict[str, Tx], bool]:
    by_id: dict[str, Tx] = {}
    for tx in txs:
        if tx.id in by_id:
            raise DuplicateId(f"transaction id {tx.id!r} appears twice")
        by_id[tx.id] = tx
        if tx.proposer not in ranks:
            raise UnknownProposer(f"proposer {tx.proposer!r} of {tx.id} has no rank")
    stamped = {tx.t_da is not None for tx in txs}
    if len(stamped) > 1:
        raise MixedTimestampPresence("some transactions carry t_da and others do not")
    first: dict[str, Tx] = {}
    for tx in txs:
        ref = first.setdefault(tx.logical_id, tx)
        if ref.tip != tx.tip:
            raise InconsistentDuplicateTips(f"copies of {tx.logical_id!r} carry tips {ref.tip} and {tx.tip}")
        if ref.deps != tx.deps:
            raise InconsistentDuplicateDeps(f"copies of {tx.logical_id!r} declare different deps")
    return by_id, stamped == {True}


def _cycle_members(nodes: set[str], succ: Mapping[str, list[str]]) -> set[str]:
    """Vertices of ``nodes`` lying on a directed cycle (iterative Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: set[str] = set()
    counter = 0
    for root in sorted(nodes):
        if root in index:
            continue
        work = [(root, iter(sorted(s for s in succ.get(root, ()) if s in nodes)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(s for s in succ.get(w, ()) if s in nodes))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in succ.get(v, ()):
                    out.update(comp)
    return out


def pdm_merge(txs: Iterable[Tx], ranks: Ranks, order_by: str = "priority") -> MergeResult:
    """Merge one tick's transactions into a single execution order.

    A dependency names a transaction id; failing that, a logical id, in which
    case every in-tick copy of it is a predecessor.  ``order_by="timestamp"``
    releases eligible transactions in ``t_da`` order instead (first-seen
    ordering), keeping the priority key only as a tie-break.
    """
    if order_by not in ("priority", "timestamp"):
        raise ConfigError(f"unknown order_by {order_by!r}")
    txs = list(txs)
    by_id, use_t_da = _validate(txs, ranks)
    if order_by == "timestamp" and txs and not use_t_da:
        raise MixedTimestampPresence("timestamp ordering needs t_da on every transaction")

    copies: dict[str, list[str]] = defaultdict(list)
    for tx in txs:
        copies[tx.logical_id].append(tx.id)

    succ: dict[str, list[str]] = defaultdict(list)
    indeg: dict[str, int] = {}
    dangling: set[str] = set()
    for tx in txs:
        preds: set[str] = set()
        for d in tx.deps:
            if d in by_id:
                preds.add(d)
            elif d in copies:
                preds.update(copies[d])
            else:
                dangling.add(tx.id)
        for u in preds:
            succ[u].append(tx.id)
        indeg[tx.id] = len(preds)

    heap = [
        _heap_entry(tx, ranks, use_t_da, order_by)
        for tx in txs
        if indeg[tx.id] == 0 and tx.id not in dangling
    ]
    heapq.heapify(heap)
    copy_order: list[str] = []
    while heap:
        tid = heapq.heappop(heap)[-1]
        copy_order.append(tid)
        for w in succ.get(tid, ()):
            indeg[w] -= 1
            if indeg[w] == 0 and w not in dangling:
                heapq.heappush(heap, _heap_entry(by_id[w], ranks, use_t_da, order_by))

    done = set(copy_order)
    stuck = set(by_id) - done
    cycles = _cycle_members(stuck, succ) if stuck else set()
    rejected_dangling = (dangling & stuck) - cycles
    dependents = stuck - cycles - rejected_dangling

    order: list[str] = []
    pruned: list[str] = []
    executed: dict[str, str] = {}
    for tid in copy_order:
        lid = by_id[tid].logical_id
        if lid in executed:
            pruned.append(tid)
        else:
            executed[lid] = tid
            order.append(tid)

    payouts, burned, counts = split_tips(copy_order, by_id)
    return MergeResult(
        order=order,
        copy_order=copy_order,
        pruned=pruned,
        rejected_cycles=cycles,
        rejected_dependents=dependents,
        rejected_dangling=rejected_dangling,
        payouts=payouts,
        burned=burned,
        executed=executed,
        duplicate_counts=counts,
    )


def split_tips(copy_order: list[str], txs_by_id: Mapping[str, Tx]) -> tuple[dict[str, int], int, dict[str, int]]:
    """Pay each merged copy ``tip // m_x`` in integer units.

    Returns ``(payouts, burned, m_x per logical id)``; the remainders of the
    integer divisions are burned so that payouts plus burn equal executed tips.
    """
    groups: dict[str, list[Tx]] = defaultdict(list)
    for tid in copy_order:
        tx = txs_by_id[tid]
        groups[tx.logical_id].append(tx)
    payouts: dict[str, int] = defaultdict(int)
    burned = 0
    counts: dict[str, int] = {}
    for lid, group in groups.items():
        m = len(group)
        tip = group[0].tip
        if any(t.tip != tip for t in group):
            raise InconsistentDuplicateTips(f"copies of {lid!r} carry different tips")
        share, rem = divmod(tip, m)
        for t in group:
            payouts[t.proposer] += share
        burned += rem
        counts[lid] = m
    return dict(payouts), burned, counts


def parse_tx_file(stream: TextIO, epoch_seed: bytes | str = b"") -> list[Tx]:
    """Read whitespace-separated records
    ``id logical_id proposer tip_units deps t_da nonce [sender]``.

    ``deps`` is a comma list or ``-``; ``t_da`` is a number or ``-``; the
    sender defaults to the logical id.  ``#`` starts a comment.
    """
    out = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (7, 8):
            raise ConfigError(f"line {lineno}: expected 7 or 8 fields, got {len(parts)}")
        tid, lid, prop, tip_s, deps_s, tda_s, nonce_s = parts[:7]
        sender = parts[7] if len(parts) == 8 else lid
        try:
            tip = int(tip_s)
            nonce = int(nonce_s)
            t_da = None if tda_s == "-" else float(tda_s)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        deps = frozenset() if deps_s == "-" else frozenset(d for d in deps_s.split(",") if d)
        out.append(Tx(tid, lid, tip, prop, deps, t_da, tie_hash(epoch_seed, sender, nonce)))
    return out
