from __future__ import annotations

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpmev.errors import (
    ConfigError,
    DuplicateId,
    InconsistentDuplicateDeps,
    InconsistentDuplicateTips,
    MixedTimestampPresence,
    UnknownProposer,
)
from mcpmev.scheduler import Tx, parse_tx_file, pdm_merge, priority_key, split_tips, tie_hash

RANKS = {"P1": 1, "P2": 2, "P3": 3}
GOLDEN_TIE_HASH = 3874873480442379730


def tx(i, tip, proposer="P1", deps=(), lid=None, t_da=None, h=0):
    return Tx(i, lid or i, tip, proposer, frozenset(deps), t_da, h)


def test_priority_key_examples():
    assert priority_key(tx("a", 7), RANKS) > priority_key(tx("b", 5), RANKS)
    assert priority_key(tx("a", 5, "P1"), RANKS) > priority_key(tx("b", 5, "P2"), RANKS)
    early, late = tx("a", 5, t_da=0.1), tx("b", 5, t_da=0.2)
    assert priority_key(early, RANKS) > priority_key(late, RANKS)
    with pytest.raises(UnknownProposer):
        priority_key(tx("a", 1, "P9"), RANKS)


def test_tie_hash_golden_vector():
    assert tie_hash(b"test", b"a", 0) == GOLDEN_TIE_HASH
    assert tie_hash("test", "a", 0) == GOLDEN_TIE_HASH
    assert tie_hash(b"test", b"a", 0) != tie_hash(b"test", b"a", 1)
    assert tie_hash(b"other", b"a", 0) != GOLDEN_TIE_HASH


def test_merge_pure_tip_sort():
    res = pdm_merge([tx("a", 5), tx("b", 3), tx("c", 7)], RANKS)
    assert res.order == ["c", "a", "b"]
    assert res.payouts == {"P1": 15} and res.burned == 0


def test_merge_dependency_delays_high_tip():
    res = pdm_merge([tx("a", 1), tx("b", 9, deps=["a"]), tx("c", 5)], RANKS)
    assert res.order == ["c", "a", "b"]


def test_merge_rejects_cycle_and_dependents():
    res = pdm_merge(
        [tx("a", 1, deps=["b"]), tx("b", 2, deps=["a"]), tx("c", 5), tx("d", 9, deps=["a"])], RANKS
    )
    assert res.order == ["c"]
    assert res.rejected_cycles == {"a", "b"}
    assert res.rejected_dependents == {"d"}


def test_merge_rejects_dangling():
    res = pdm_merge([tx("a", 1, deps=["zz"]), tx("b", 2, deps=["a"]), tx("c", 3)], RANKS)
    assert res.order == ["c"]
    assert res.rejected_dangling == {"a"} and res.rejected_dependents == {"b"}


def test_dependency_on_logical_id_waits_for_all_copies():
    txs = [
        tx("x1", 4, "P1", lid="x"),
        tx("x2", 4, "P2", lid="x"),
        tx("y", 100, "P3", deps=["x"]),
    ]
    res = pdm_merge(txs, RANKS)
    assert res.copy_order == ["x1", "x2", "y"]
    assert res.order == ["x1", "y"] and res.pruned == ["x2"]


def test_duplicate_tip_split():
    txs = [tx("x1", 10, "P2", lid="x"), tx("x2", 10, "P1", lid="x")]
    res = pdm_merge(txs, RANKS)
    assert res.executed == {"x": "x2"}  # better rank executes
    assert res.payouts == {"P1": 5, "P2": 5}
    three = [tx(f"x{i}", 9, p, lid="x") for i, p in enumerate(RANKS)]
    res = pdm_merge(three, RANKS)
    assert sum(res.payouts.values()) == 9 and res.burned == 0
    uneven = pdm_merge([tx("x1", 10, "P1", lid="x"), tx("x2", 10, "P2", lid="x"), tx("x3", 10, "P3", lid="x")], RANKS)
    assert uneven.payouts == {"P1": 3, "P2": 3, "P3": 3} and uneven.burned == 1


def test_split_tips_single_copy():
    by_id = {"a": tx("a", 7, "P2")}
    assert split_tips(["a"], by_id) == ({"P2": 7}, 0, {"a": 1})


def test_validation_errors():
    with pytest.raises(DuplicateId):
        pdm_merge([tx("a", 1), tx("a", 2)], RANKS)
    with pytest.raises(UnknownProposer):
        pdm_merge([tx("a", 1, "Q")], RANKS)
    with pytest.raises(MixedTimestampPresence):
        pdm_merge([tx("a", 1, t_da=0.1), tx("b", 1)], RANKS)
    with pytest.raises(InconsistentDuplicateTips):
        pdm_merge([tx("a1", 1, lid="a"), tx("a2", 2, "P2", lid="a")], RANKS)
    with pytest.raises(InconsistentDuplicateDeps):
        pdm_merge([tx("a1", 1, lid="a"), tx("a2", 1, "P2", lid="a", deps=["c"]), tx("c", 1)], RANKS)


def test_timestamp_ordering():
    txs = [tx("a", 9, t_da=0.5), tx("b", 1, t_da=0.1), tx("c", 5, t_da=0.1)]
    assert pdm_merge(txs, RANKS, order_by="timestamp").order == ["c", "b", "a"]
    assert pdm_merge(txs, RANKS).order == ["a", "c", "b"]
    with pytest.raises(ConfigError):
        pdm_merge(txs, RANKS, order_by="random")


def test_parse_tx_file():
    text = """
    # id logical proposer tip deps t_da nonce [sender]
    a a P1 5 - - 0
    b b P2 3 a - 1 alice   # trailing comment
    """
    txs = parse_tx_file(io.StringIO(text), "test")
    assert [t.id for t in txs] == ["a", "b"]
    assert txs[1].deps == frozenset({"a"}) and txs[1].tip == 3
    assert txs[0].tie_hash == GOLDEN_TIE_HASH
    assert txs[1].tie_hash == tie_hash(b"test", b"alice", 1)
    with pytest.raises(ConfigError):
        parse_tx_file(io.StringIO("a a P1 five - - 0"))
    with pytest.raises(ConfigError):
        parse_tx_file(io.StringIO("a a P1"))


@st.composite
def tick(draw):
    n = draw(st.integers(1, 14))
    out = []
    for i in range(n):
        deps = draw(st.sets(st.integers(0, n - 1), max_size=2))
        out.append(
            Tx(
                f"t{i}",
                f"t{i}",
                draw(st.integers(0, 5)),
                draw(st.sampled_from(sorted(RANKS))),
                frozenset(f"t{d}" for d in deps if d != i),
                None,
                draw(st.integers(0, 2**64 - 1)),
            )
        )
    return out


@settings(max_examples=200, deadline=None)
@given(tick(), st.randoms(use_true_random=False))
def test_merge_is_permutation_invariant_and_feasible(txs, rnd):
    ref = pdm_merge(txs, RANKS)
    shuffled = list(txs)
    rnd.shuffle(shuffled)
    again = pdm_merge(shuffled, RANKS)
    assert again.order == ref.order and again.rejected == ref.rejected
    pos = ref.position()
    by_id = {t.id: t for t in txs}
    for tid in ref.order:
        for d in by_id[tid].deps:
            assert d in pos and pos[d] < pos[tid]
    assert set(ref.order) | ref.rejected == set(by_id)
    assert not set(ref.order) & ref.rejected
