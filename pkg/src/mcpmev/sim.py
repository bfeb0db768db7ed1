"""Monte Carlo model of one tick with concurrent proposers.

Pipeline per tick: transactions are allocated to proposers, each proposer
censors or includes them, blocks are published to the dissemination layer,
availability certificates race the tick boundary, thieves copy transactions
they see early enough, and the certified blocks are merged.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .games import StealParams
from .hazard import HazardParams, drop_cutoff, u_mev
from .numeric import RngStream
from .scheduler import MergeResult, Tx, pdm_merge, tie_hash


@dataclass(frozen=True)
class ProposerCfg:
    id: str
    rank: int
    mu: float
    budget: float
    censor_prob: float = 0.0
    publish_latency: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ConfigError(f"proposer {self.id}: mu must be finite and > 0")
        if not self.budget >= 0:
            raise ConfigError(f"proposer {self.id}: budget must be >= 0")
        if not 0.0 <= self.censor_prob < 1.0:
            raise ConfigError(f"proposer {self.id}: censor_prob must lie in [0, 1)")
        if not self.publish_latency >= 0:
            raise ConfigError(f"proposer {self.id}: publish_latency must be >= 0")


@dataclass(frozen=True)
class Submission:
    """One logical transaction and the proposers it is sent to."""

    logical_id: str
    tip: int
    proposers: tuple[str, ...]
    deps: frozenset = frozenset()


@dataclass(frozen=True)
class Workload:
    """Random transactions: integer tips uniform on ``[tip_min, tip_max]``, each
    depending on every earlier one with probability ``dep_prob``, each sent to
    ``copies`` distinct proposers drawn uniformly."""

    n_txs: int = 0
    tip_min: int = 1
    tip_max: int = 10
    dep_prob: float = 0.0
    copies: int = 1
    epoch_seed: str = "epoch"

    def __post_init__(self):
        if self.n_txs < 0 or self.copies < 1:
            raise ConfigError("workload needs n_txs >= 0 and copies >= 1")
        if not 0 <= self.tip_min <= self.tip_max:
            raise ConfigError("workload needs 0 <= tip_min <= tip_max")
        if not 0.0 <= self.dep_prob <= 1.0:
            raise ConfigError("workload dep_prob must lie in [0, 1]")


@dataclass(frozen=True)
class ThiefStrategy:
    kind: str = "none"  # none | always | mixed
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "always", "mixed"):
            raise ConfigError(f"unknown thief strategy {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("mixed stealing probability must lie in [0, 1]")

    @property
    def prob(self) -> float:
        return {"none": 0.0, "always": 1.0, "mixed": self.p}[self.kind]


@dataclass(frozen=True)
class TickConfig:
    proposers: Sequence[ProposerCfg]
    ell: int = 1
    capacity: Optional[int] = None
    workload: Workload = field(default_factory=Workload)
    thief_strategy: ThiefStrategy = field(default_factory=ThiefStrategy)
    thieves: Optional[Sequence[str]] = None
    observation_latency: float = 0.0
    ordering: str = "priority"
    hazard: Optional[HazardParams] = None
    drop_beta: Optional[float] = None
    extra: Sequence[Submission] = ()

    def __post_init__(self):
        object.__setattr__(self, "proposers", tuple(self.proposers))
        object.__setattr__(self, "extra", tuple(self.extra))
        if not self.proposers:
            raise ConfigError("at least one proposer is required")
        ids = [p.id for p in self.proposers]
        if len(set(ids)) != len(ids):
            raise ConfigError("proposer ids must be unique")
        if sorted(p.rank for p in self.proposers) != list(range(1, len(ids) + 1)):
            raise ConfigError("proposer ranks must be a permutation of 1..n")
        if int(self.ell) != self.ell or self.ell < 1:
            raise ConfigError("ell must be a positive integer")
        if self.capacity is not None and self.capacity < 1:
            raise ConfigError("capacity must be >= 1 when bounded")
        if self.workload.copies > len(ids):
            raise ConfigError("workload copies exceed the number of proposers")
        if self.thieves is not None:
            object.__setattr__(self, "thieves", tuple(self.thieves))
            unknown = set(self.thieves) - set(ids)
            if unknown:
                raise ConfigError(f"unknown thieves {sorted(unknown)}")
        if not self.observation_latency >= 0:
            raise ConfigError("observation_latency must be >= 0")
        if self.ordering not in ("priority", "timestamp"):
            raise ConfigError(f"unknown ordering {self.ordering!r}")
        if (self.drop_beta is None) != (self.hazard is None):
            raise ConfigError("hazard and drop_beta must be given together")
        for s in self.extra:
            if set(s.proposers) - set(ids):
                raise ConfigError(f"submission {s.logical_id} names unknown proposers")

    def proposer(self, pid: str) -> ProposerCfg:
        for p in self.proposers:
            if p.id == pid:
                return p
        raise ConfigError(f"unknown proposer {pid!r}")

    @property
    def ranks(self) -> dict[str, int]:
        return {p.id: p.rank for p in self.proposers}


@dataclass(frozen=True)
class BlockEvent:
    block_id: str
    proposer: str
    publish: float
    poa: float
    made: bool
    stolen: bool = False

    @property
    def certified(self) -> float:
        return self.publish + self.poa


@dataclass
class TickOutcome:
    merge: MergeResult
    made_tick: set[str]
    blocks: list[BlockEvent]
    payoffs: dict[str, int]
    copies: dict[str, Tx]


def _workload(cfg: TickConfig, rng: np.random.Generator) -> list[Submission]:
    w = cfg.workload
    ids = [p.id for p in cfg.proposers]
    subs = []
    for q in range(w.n_txs):
        tip = int(rng.integers(w.tip_min, w.tip_max + 1))
        chosen = rng.choice(len(ids), size=w.copies, replace=False)
        deps = frozenset(f"x{r}" for r in range(q) if rng.random() < w.dep_prob) if w.dep_prob > 0 else frozenset()
        subs.append(Submission(f"x{q}", tip, tuple(ids[i] for i in sorted(chosen)), deps))
    return subs


def run_tick(cfg: TickConfig, stream: RngStream) -> TickOutcome:
    rng = stream.generator()
    subs = list(cfg.extra) + _workload(cfg, rng)
    seed = cfg.workload.epoch_seed
    hashes = {s.logical_id: tie_hash(seed, s.logical_id, i) for i, s in enumerate(subs)}
    cutoff = drop_cutoff(cfg.drop_beta, cfg.hazard) if cfg.hazard is not None else 0.0

    # Proposer inclusion decisions.
    held: dict[str, list[Submission]] = {p.id: [] for p in cfg.proposers}
    for s in subs:
        for pid in s.proposers:
            p = cfg.proposer(pid)
            censored = rng.random() < p.censor_prob
            if not censored and s.tip >= cutoff:
                held[pid].append(s)

    # Own blocks race the tick boundary.
    blocks: dict[str, BlockEvent] = {}
    for p in cfg.proposers:
        poa = float(rng.gamma(cfg.ell, 1.0 / p.mu))
        blocks[p.id] = BlockEvent(p.id, p.id, p.publish_latency, poa, poa <= p.budget)

    # Thieves copy what they observe before their own deadline.
    steal_prob = cfg.thief_strategy.prob
    thieves = cfg.thieves if cfg.thieves is not None else tuple(p.id for p in cfg.proposers)
    stolen: dict[str, list[Submission]] = {}
    if steal_prob > 0:
        for j in thieves:
            pj = cfg.proposer(j)
            deadline = pj.publish_latency + pj.budget
            own = {s.logical_id for s in held[j]}
            seen: dict[str, float] = {}
            seen_sub: dict[str, Submission] = {}
            for p in cfg.proposers:
                if p.id == j:
                    continue
                t_obs = blocks[p.id].publish + cfg.observation_latency
                for s in held[p.id]:
                    if s.logical_id in own:
                        continue
                    if s.logical_id not in seen or t_obs < seen[s.logical_id]:
                        seen[s.logical_id] = t_obs
                        seen_sub[s.logical_id] = s
            t_first = min(seen.values(), default=math.inf)
            publish = max(pj.publish_latency, t_first)
            if publish > deadline:
                continue
            # a copy is only stealable if observed by the time the steal block goes out
            take = [seen_sub[l] for l in sorted(seen) if seen[l] <= publish and rng.random() < steal_prob]
            if not take:
                continue
            poa = float(rng.gamma(cfg.ell, 1.0 / pj.mu))
            bid = f"{j}!steal"
            blocks[bid] = BlockEvent(bid, j, publish, poa, publish + poa <= deadline, stolen=True)
            stolen[bid] = take

    # Capacity: earliest certificates first, then proposer rank.
    ranks = cfg.ranks
    made = [b for b in blocks.values() if b.made]
    made.sort(key=lambda b: (b.certified, ranks[b.proposer], b.stolen))
    if cfg.capacity is not None:
        made = made[: cfg.capacity]
    made_ids = {b.block_id for b in made}

    copies: dict[str, Tx] = {}
    for b in made:
        content = stolen[b.block_id] if b.stolen else held[b.proposer]
        for s in content:
            tid = f"{s.logical_id}@{b.block_id}"
            copies[tid] = Tx(tid, s.logical_id, s.tip, b.proposer, s.deps, b.certified, hashes[s.logical_id])

    merge = pdm_merge(copies.values(), ranks, order_by=cfg.ordering)
    return TickOutcome(merge, made_ids, list(blocks.values()), dict(merge.payouts), copies)


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float
    trials: int

    def __str__(self) -> str:
        return f"{self.mean:.6g} +/- {self.se:.2g}"


def _bernoulli_estimate(hits: int, trials: int) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / trials), trials)


def _run_batches(fn, trials: int, stream: RngStream, threads: int = 1, batch: int = 1000):
    """Apply ``fn(stream, start, stop)`` to fixed trial batches; each batch owns
    ``stream.spawn(batch_index)`` so results ignore ``threads``."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    spans = [(i, s, min(s + batch, trials)) for i, s in enumerate(range(0, trials, batch))]
    jobs = [(stream.spawn(i), s, e) for i, s, e in spans]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda a: fn(*a), jobs))
    return [fn(*a) for a in jobs]


def estimate_sigma_rho(
    cfg: TickConfig,
    victim: str,
    thief: str,
    trials: int,
    stream: RngStream,
    threads: int = 1,
) -> tuple[Estimate, Estimate]:
    """Frequencies of the thief's copy executing first while both blocks make
    the tick (sigma) and of the thief's copy executing after the victim's block
    misses it (rho), for one transaction held by the victim."""
    if victim == thief:
        raise ConfigError("victim and thief must differ")
    v = replace(cfg.proposer(victim), censor_prob=0.0)
    props = [v if p.id == victim else p for p in cfg.proposers]
    tagged = Submission("target", 1, (victim,))
    derived = replace(
        cfg,
        proposers=props,
        workload=replace(cfg.workload, n_txs=0),
        extra=(tagged,),
        thieves=(thief,),
        thief_strategy=ThiefStrategy("always"),
        hazard=None,
        drop_beta=None,
    )
    v_copy = f"target@{victim}"
    t_copy = f"target@{thief}!steal"

    def batch(s: RngStream, start: int, stop: int) -> tuple[int, int]:
        sig = rho = 0
        for t in range(start, stop):
            out = run_tick(derived, s.spawn(t))
            order = out.merge.copy_order
            has_v, has_t = v_copy in order, t_copy in order
            if has_v and has_t and order.index(t_copy) < order.index(v_copy):
                sig += 1
            elif not has_v and out.merge.executed.get("target") == t_copy:
                rho += 1
        return sig, rho

    res = _run_batches(batch, trials, stream, threads)
    sig = sum(r[0] for r in res)
    rho = sum(r[1] for r in res)
    return _bernoulli_estimate(sig, trials), _bernoulli_estimate(rho, trials)


def estimate_inclusion(cfg: TickConfig, k: int, trials: int, stream: RngStream, threads: int = 1) -> Estimate:
    """Frequency with which a tagged transaction sent to the first ``k``
    proposers (in configuration order) executes."""
    if k < 0 or k > len(cfg.proposers):
        raise ConfigError(f"k must lie in [0, {len(cfg.proposers)}]")
    if k == 0:
        return Estimate(0.0, 0.0, trials)
    tagged = Submission("target", 1, tuple(p.id for p in cfg.proposers[:k]))
    derived = replace(cfg, extra=(tagged,) + tuple(cfg.extra))

    def batch(s: RngStream, start: int, stop: int) -> int:
        return sum("target" in run_tick(derived, s.spawn(t)).merge.executed for t in range(start, stop))

    hits = sum(_run_batches(batch, trials, stream, threads))
    return _bernoulli_estimate(hits, trials)


@dataclass(frozen=True)
class DeviationResult:
    q: float
    gain: float
    se: float

    @property
    def ok(self) -> bool:
        return self.gain <= 3.0 * self.se + 1e-12


def check_mixed_equilibrium(
    p: StealParams,
    p_star: float,
    deviations: Sequence[float],
    trials: int,
    stream: RngStream,
) -> list[DeviationResult]:
    """Monte Carlo gain of one thief stealing with probability ``q`` while the
    other ``m-1`` steal with ``p_star``.

    Each trial draws the rivals' choices, whether a win path opens (probability
    ``sigma + rho``) and which attempter wins; the deviator's choice uses a
    uniform shared between ``q`` and ``p_star`` so that gains are measured
    with common random numbers.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    rng = stream.generator()
    rivals = rng.binomial(p.m - 1, p_star, size=trials)
    win_path = rng.random(trials) < p.win
    u_choice = rng.random(trials)
    u_winner = rng.random(trials)
    # payoff conditional on attempting: prize if the win path opens and we win the draw
    wins = win_path & (u_winner * (rivals + 1) < 1.0)
    attempt_value = np.where(wins, p.prize, 0.0) - p.phi
    base = np.where(u_choice < p_star, attempt_value, 0.0)
    out = []
    for q in deviations:
        diff = np.where(u_choice < q, attempt_value, 0.0) - base
        out.append(DeviationResult(q, float(diff.mean()), float(diff.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0))
    return out


@dataclass(frozen=True)
class DelayCheck:
    alpha: float
    mean: float
    se: float
    analytic: float

    @property
    def ok(self) -> bool:
        return abs(self.mean - self.analytic) <= 3.0 * self.se + 1e-12


def check_delay_objective(
    hazard: HazardParams,
    tau: float,
    alphas: Sequence[float],
    trials: int,
    stream: RngStream,
) -> list[DelayCheck]:
    """Simulate delaying by ``alpha``: the opportunity dies at an Exp(lam) time,
    MEV ``A(1 - e^{-k s})`` accrues until the delay ends or it dies, and the tip
    is paid if the transaction survives its tip hazard (the same clock when
    ``delta == lam``)."""
    if trials < 2:
        raise ConfigError("trials must be >= 2")
    out = []
    for i, alpha in enumerate(alphas):
        rng = stream.spawn(i).generator()
        pre = rng.exponential(1.0 / hazard.lam, size=trials)
        if hazard.delta == hazard.lam:
            tip_clock = pre
        elif hazard.delta == 0:
            tip_clock = np.full(trials, np.inf)
        else:
            tip_clock = rng.exponential(1.0 / hazard.delta, size=trials)
        horizon = np.minimum(alpha, pre)
        payoff = hazard.A * -np.expm1(-hazard.k * horizon) + np.where(tip_clock > alpha, tau, 0.0)
        out.append(
            DelayCheck(alpha, float(payoff.mean()), float(payoff.std(ddof=1) / math.sqrt(trials)), u_mev(alpha, tau, hazard))
        )
    return out
