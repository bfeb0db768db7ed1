"""Acceptance suite: every closed form checked against an independent oracle.

Each ``cN`` function runs one criterion and returns a :class:`CriterionResult`.
Random draws come from fixed :class:`RngStream` keys so reruns are identical.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import auction, externality, games, hazard, oracles, poa, scheduler, sim
from .errors import NoRoot
from .numeric import RngStream

SEED = 314159


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _stream(seed: int, n: int) -> RngStream:
    return RngStream(seed, n)


def _loguniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def _hazard_draws(seed: int, n: int = 1000):
    """Random ``(params, tau)`` with ``delta`` strictly inside ``(0, k+lam)`` and
    ``tau`` log-uniform from ``1e-3`` to ``2`` times the immediate threshold."""
    rng = _stream(seed, 1).generator()
    out = []
    for _ in range(n):
        A, k, lam = (_loguniform(rng, 0.1, 10.0) for _ in range(3))
        delta = float(rng.uniform(0.05, 0.95)) * (k + lam)
        p = hazard.HazardParams(A, k, lam, delta)
        tau = hazard.immediate_threshold(p) * _loguniform(rng, 1e-3, 2.0)
        out.append((p, tau))
    return out


def c1(seed: int = SEED) -> tuple[bool, str]:
    start = time.perf_counter()
    worst_val = worst_arg = 0.0
    for p, tau in _hazard_draws(seed):
        arg, val = oracles.numeric_delay_optimum(tau, p.A, p.k, p.lam, p.delta)
        choice = hazard.optimal_delay(tau, p)
        m = hazard.envelope(tau, p)
        worst_val = max(worst_val, abs(m - val) / abs(val))
        worst_arg = max(worst_arg, abs((choice.alpha or 0.0) - arg))
    elapsed = time.perf_counter() - start
    ok = worst_val <= 1e-8 and worst_arg <= 1e-5 and elapsed < 10.0
    return ok, f"max rel value err {worst_val:.2e}, max argmax err {worst_arg:.2e}, elapsed {elapsed:.2f}s"


def c2(seed: int = SEED) -> tuple[bool, str]:
    worst = 0.0
    for p, tau in _hazard_draws(seed):
        q = hazard.HazardParams(p.A, p.k, p.lam)
        m2, m1 = hazard.envelope(tau, q), hazard.envelope_one_hazard(tau, q)
        a2, a1 = hazard.optimal_delay(tau, q).alpha, hazard.optimal_delay_one_hazard(tau, q)
        worst = max(worst, abs(m2 - m1) / abs(m1), abs(a2 - a1) / max(abs(a1), 1e-300) if a1 else abs(a2 or 0.0))
    return worst <= 1e-12, f"max rel diff {worst:.2e}"


def c3(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 3).generator()
    worst = 0.0
    zero_ok = True
    for _ in range(100):
        A, k, lam = (_loguniform(rng, 0.1, 10.0) for _ in range(3))
        delta = float(rng.uniform(0.05, 0.95)) * (k + lam)
        p = hazard.HazardParams(A, k, lam, delta)
        m0 = hazard.envelope(0.0, p)
        beta = m0 * _loguniform(rng, 1.0 + 1e-6, 20.0)
        worst = max(worst, abs(hazard.envelope(hazard.drop_cutoff(beta, p), p) - beta))
        below = m0 * float(rng.uniform(0.0, 1.0))
        zero_ok &= hazard.drop_cutoff(below, p) == 0.0 and hazard.drop_cutoff(m0, p) == 0.0
    return worst <= 1e-9 and zero_ok, f"max |M(tau_d)-beta| {worst:.2e}, zero below M(0): {zero_ok}"


def c4(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 4).generator()
    bad = 0
    for _ in range(1000):
        v = _loguniform(rng, 0.5, 100.0)
        c = _loguniform(rng, 0.01, 5.0)
        s = int(rng.integers(1, 6))
        Q = float(rng.uniform(0.0, 0.99))
        p = games.CensorUserParams(v, c, s, Q)
        bad += games.optimal_rounds(p) != oracles.brute_force_rounds(v, c, s, Q)
    return bad == 0, f"{bad} mismatches in 1000"


def c5(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 5).generator()
    worst_g = 0.0
    interior = 0
    while interior < 200:
        m = int(rng.integers(2, 12))
        sigma = float(rng.uniform(0, 0.6))
        rho = float(rng.uniform(0, 1 - sigma))
        tau = _loguniform(rng, 0.5, 50.0)
        phi = _loguniform(rng, 0.05, 20.0)
        p = games.StealParams(sigma, rho, phi, tau, 0.0, m)
        ps = games.steal_mixed_equilibrium(p)
        if 0.0 < ps < 1.0:
            interior += 1
            worst_g = max(worst_g, abs(games.steal_gain(ps, p)))
    ok_g = worst_g <= 1e-10

    # unilateral deviations around an interior equilibrium
    p = games.StealParams(0.3, 0.2, 1.0, 8.0, 0.0, 6)
    ps = games.steal_mixed_equilibrium(p)
    devs = [0.0, ps / 2, ps, (1 + ps) / 2, 1.0]
    res = sim.check_mixed_equilibrium(p, ps, devs, 100_000, _stream(seed, 50))
    ok_dev = 0.0 < ps < 1.0 and all(r.ok for r in res)

    # comparative statics on 4-point grids
    base = dict(sigma=0.3, rho=0.2, phi=1.0, tau=8.0, delta_x=0.0, m=6)

    def pstar(**kw) -> float:
        return games.steal_mixed_equilibrium(games.StealParams(**{**base, **kw}))

    def monotone(vals, increasing):
        pairs = list(zip(vals, vals[1:]))
        return all((b >= a) if increasing else (b <= a) for a, b in pairs)

    statics = {
        "R": monotone([pstar(tau=t) for t in (4.0, 6.0, 8.0, 12.0)], True),
        "sigma+rho": monotone([pstar(sigma=s, rho=0.0) for s in (0.3, 0.5, 0.7, 0.9)], True),
        "phi": monotone([pstar(phi=f) for f in (0.5, 0.8, 1.0, 1.5)], False),
        "m": monotone([pstar(m=m) for m in (3, 5, 8, 12)], False),
    }
    ok_cs = all(statics.values())
    gains = ", ".join(f"q={r.q:.3f}:{r.gain:+.2e}/{r.se:.1e}" for r in res)
    return ok_g and ok_dev and ok_cs, (
        f"max |g(p*)| {worst_g:.1e} over {interior} interior; p*={ps:.4f} deviations [{gains}]; statics {statics}"
    )


def c6(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 6).generator()
    bad = 0
    for _ in range(100):
        tau = int(rng.integers(1, 10_000))
        phi = float(rng.uniform(0.5, 500.0))
        n = games.anti_steal_multiplicity(tau, phi)
        txs = {f"c{i}": scheduler.Tx(f"c{i}", "x", tau, f"P{i}") for i in range(n + 1)}
        payouts, _, _ = scheduler.split_tips(list(txs), txs)
        per_copy = max(payouts.values())
        ok = per_copy <= tau / (n + 1) and tau / (n + 1) < phi
        ok &= not games.steal_profitable(games.StealParams(1.0, 0.0, phi, tau / (n + 1)))
        if n > 0:
            ok &= games.steal_profitable(games.StealParams(1.0, 0.0, phi, tau / n)) or tau / n == phi
        ok &= n == oracles.scan_multiplicity(tau, phi)
        bad += not ok
    return bad == 0, f"{bad} failures in 100"


def c7(seed: int = SEED) -> tuple[bool, str]:
    worst = max(abs(auction.uniform_opt_revenue(1.0, m) - auction.uniform_revenue(1.0, 0.5, m)) for m in range(1, 31))
    ok_eq = worst <= 1e-12
    mc_bad = []
    i = 0
    for m in (1, 2, 5, 10):
        for r in (0.0, 0.25, 0.5):
            i += 1
            mean, se = oracles.second_price_revenue_mc(1.0, r, m, 1_000_000, _stream(seed, 70 + i).generator())
            if abs(mean - auction.uniform_revenue(1.0, r, m)) > 3 * se:
                mc_bad.append((m, r))
    ok_vals = abs(auction.uniform_opt_revenue(2.0, 1) - 0.25 * 2.0) < 1e-15 and abs(
        auction.uniform_opt_revenue(2.0, 2) - 5 / 12 * 2.0
    ) < 1e-15
    num_err = max(
        abs(auction.myerson_revenue_numeric(auction.AuctionSpec(m, auction.Uniform(3.0))) - auction.uniform_opt_revenue(3.0, m))
        for m in (1, 2, 5, 10)
    )
    ok = ok_eq and not mc_bad and ok_vals and num_err <= 1e-6
    return ok, f"max |Rev*-Rev(r*)| {worst:.1e}; MC misses {mc_bad}; m=1,2 values {ok_vals}; numeric err {num_err:.1e}"


def _sigma_cfg(ell: int, mu_i: float, mu_j: float, budget: float) -> sim.TickConfig:
    return sim.TickConfig(
        proposers=[
            sim.ProposerCfg("victim", 1, mu_i, budget),
            sim.ProposerCfg("thief", 2, mu_j, budget),
        ],
        ell=ell,
        ordering="timestamp",
    )


def c8(seed: int = SEED, sigma_trials: int = 4000) -> tuple[bool, str]:
    misses = []
    i = 0
    for ell in (1, 2, 3, 5):
        for ratio in (0.5, 1.0, 2.0):
            i += 1
            mu_i, mu_j = 1.0, ratio
            budget = ell / mu_j
            g = _stream(seed, 800 + i).generator()
            mean, se = oracles.erlang_success_mc(ell, mu_j, budget, 1_000_000, g)
            if abs(mean - poa.poa_success(ell, mu_j, budget)) > 3 * se:
                misses.append(("cdf", ell, ratio))
            mean, se = oracles.race_mc(ell, mu_i, mu_j, 1_000_000, g)
            if abs(mean - poa.race_prob(ell, mu_i, mu_j)) > 3 * se:
                misses.append(("race", ell, ratio))
    sym = all(poa.race_prob(ell, 2.5, 2.5) == 0.5 for ell in (1, 2, 3, 5, 20, 80))
    comp = max(
        abs(poa.race_prob(ell, a, b) + poa.race_prob(ell, b, a) - 1.0)
        for ell in (1, 2, 3, 5, 10, 60)
        for a, b in ((1.0, 0.5), (1.0, 2.0), (0.3, 7.0))
    )
    over = []
    j = 0
    for ell in (1, 2, 3):
        for ratio in (0.5, 1.0, 2.0):
            for budget in (0.5, 1.0, 2.0):
                j += 1
                bound = poa.stealability_bound(poa.RaceParams(ell, 1.0, ratio, budget, budget))
                bound = min(bound, poa.race_prob(ell, 1.0, ratio), poa.poa_success(ell, ratio, budget))
                s_hat, _ = sim.estimate_sigma_rho(_sigma_cfg(ell, 1.0, ratio, budget), "victim", "thief", sigma_trials, _stream(seed, 900 + j))
                if s_hat.mean > bound + 3 * s_hat.se:
                    over.append((ell, ratio, budget, s_hat.mean, bound))
    ok = not misses and sym and comp <= 1e-12 and not over
    return ok, f"MC misses {misses}; symmetric {sym}; max |race+race'-1| {comp:.1e}; sigma over bound {over}"


def _random_dag(rng: random.Random, max_nodes: int = 200, max_edges: int = 400) -> list[scheduler.Tx]:
    n = rng.randint(1, max_nodes)
    target_edges = rng.randint(0, min(max_edges, n * (n - 1) // 2))
    edges: set[tuple[int, int]] = set()
    for _ in range(target_edges):
        if n < 2:
            break
        a, b = sorted(rng.sample(range(n), 2))
        edges.add((a, b))
    deps: dict[int, set[str]] = {i: set() for i in range(n)}
    for a, b in edges:
        deps[b].add(f"t{a}")
    ranks_n = 8
    txs = []
    for i in range(n):
        txs.append(
            scheduler.Tx(
                f"t{i}",
                f"t{i}",
                rng.randint(0, 20),
                f"P{rng.randint(1, ranks_n)}",
                frozenset(deps[i]),
                None,
                rng.getrandbits(64),
            )
        )
    return txs


_RANKS8 = {f"P{i}": i for i in range(1, 9)}


def _linear_extension(result: scheduler.MergeResult, txs: list[scheduler.Tx]) -> bool:
    pos = result.position()
    for tx in txs:
        if tx.id not in pos:
            continue
        for d in tx.deps:
            if d not in pos or pos[d] >= pos[tx.id]:
                return False
    return True


def c9(seed: int = SEED, dags: int = 1000, perms: int = 100) -> tuple[bool, str]:
    rng = random.Random(seed)
    det_bad = ext_bad = 0
    for _ in range(dags):
        txs = _random_dag(rng)
        ref = scheduler.pdm_merge(txs, _RANKS8)
        ext_bad += not _linear_extension(ref, txs) or len(ref.order) != len(txs)
        shuffled = list(txs)
        for _ in range(perms - 1):
            rng.shuffle(shuffled)
            out = scheduler.pdm_merge(shuffled, _RANKS8)
            det_bad += out.order != ref.order or out.payouts != ref.payouts
    mono_bad = 0
    for _ in range(1000):
        txs = _random_dag(rng, 60, 120)
        idx = rng.randrange(len(txs))
        before = scheduler.pdm_merge(txs, _RANKS8).order.index(txs[idx].id)
        raised = list(txs)
        t = txs[idx]
        raised[idx] = scheduler.Tx(t.id, t.logical_id, t.tip + rng.randint(1, 30), t.proposer, t.deps, t.t_da, t.tie_hash)
        after = scheduler.pdm_merge(raised, _RANKS8).order.index(t.id)
        mono_bad += after > before
    cons_bad = 0
    for _ in range(300):
        n = rng.randint(1, 40)
        txs = []
        for q in range(n):
            tip = rng.randint(0, 1000)
            deps = frozenset(f"x{r}" for r in range(q) if rng.random() < 0.05)
            for c in rng.sample(range(1, 9), rng.randint(1, 4)):
                txs.append(scheduler.Tx(f"x{q}@P{c}", f"x{q}", tip, f"P{c}", deps, None, q))
        res = scheduler.pdm_merge(txs, _RANKS8)
        tips = {t.logical_id: t.tip for t in txs}
        executed = sum(tips[lid] for lid in res.executed)
        cons_bad += sum(res.payouts.values()) + res.burned != executed
        cons_bad += res.burned >= max(sum(res.duplicate_counts.values()), 1)
    cyc_bad = 0
    for _ in range(200):
        txs = _random_dag(rng, 40, 60)
        n = len(txs)
        if n < 3:
            continue
        cyc = sorted(rng.sample(range(n), rng.randint(2, min(5, n))))
        # close a cycle through the chosen nodes
        deps = {i: set(txs[i].deps) for i in range(n)}
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            deps[b].add(f"t{a}")
        cyc_txs = [scheduler.Tx(t.id, t.logical_id, t.tip, t.proposer, frozenset(deps[i]), None, t.tie_hash) for i, t in enumerate(txs)]
        res = scheduler.pdm_merge(cyc_txs, _RANKS8)
        expect_cycle, expect_dep = _reference_rejections(cyc_txs)
        cyc_bad += res.rejected_cycles != expect_cycle or res.rejected_dependents != expect_dep
        again = scheduler.pdm_merge(list(reversed(cyc_txs)), _RANKS8)
        cyc_bad += again.order != res.order or again.rejected != res.rejected
        cyc_bad += not _linear_extension(res, cyc_txs)
    ok = det_bad == 0 and ext_bad == 0 and mono_bad == 0 and cons_bad == 0 and cyc_bad == 0
    return ok, (
        f"permutation mismatches {det_bad}, extension failures {ext_bad}, tip-raise violations {mono_bad}, "
        f"conservation failures {cons_bad}, cycle-case failures {cyc_bad}"
    )


def _reference_rejections(txs: list[scheduler.Tx]) -> tuple[set[str], set[str]]:
    """Cycle members via reachability (u on a cycle iff u reaches itself) and
    their downstream closure, computed without the scheduler."""
    succ: dict[str, set[str]] = {t.id: set() for t in txs}
    for t in txs:
        for d in t.deps:
            succ[d].add(t.id)

    def reach(u: str) -> set[str]:
        seen, stack = set(), list(succ[u])
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(succ[w])
        return seen

    on_cycle = {t.id for t in txs if t.id in reach(t.id)}
    down: set[str] = set()
    for u in on_cycle:
        down |= reach(u)
    return on_cycle, down - on_cycle


def _multisub_draws(rng: np.random.Generator, n: int):
    for i in range(n):
        v = _loguniform(rng, 1.0, 100.0)
        c = _loguniform(rng, 0.01, 10.0)
        eta = float(rng.uniform(0.0, 5.0))
        e = externality.QuadraticExternality(float(rng.uniform(0.0, 1.0)))
        if i % 2 == 0:
            props = externality.Homogeneous(float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95)))
            k_max = 100
        else:
            props = [(float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95))) for _ in range(10)]
            k_max = 10
        yield externality.MultiSubParams(v, c, props, eta, e, reorder=True), k_max


def c10(seed: int = SEED, trials: int = 20_000) -> tuple[bool, str]:
    rng = _stream(seed, 10).generator()
    priv_bad = soc_bad = pig_bad = 0
    for p, k_max in _multisub_draws(rng, 1000):
        kp = externality.private_opt_k(p, k_max)
        ks = externality.social_opt_k(p, k_max)
        priv_bad += kp != oracles.brute_force_argmax(lambda k: externality.private_utility(k, p), k_max)
        soc_bad += ks != oracles.brute_force_argmax(lambda k: externality.social_utility(k, p), k_max)
        pig_bad += externality.private_opt_k(p, k_max, surcharge=lambda k: externality.pigou_surcharge(k, p)) != ks
    p_c, budget, mu, ell = 0.3, 1.2, 2.0, 2
    cfg = sim.TickConfig(
        proposers=[sim.ProposerCfg(f"P{i}", i, mu, budget, censor_prob=p_c) for i in range(1, 7)],
        ell=ell,
    )
    pi = poa.poa_success(ell, mu, budget)
    ms = externality.MultiSubParams(1.0, 0.0, externality.Homogeneous(p_c, pi))
    sim_bad = []
    for idx, k in enumerate((1, 2, 3, 5)):
        est = sim.estimate_inclusion(cfg, k, trials, _stream(seed, 1000 + idx))
        if abs(est.mean - externality.inclusion_prob(k, ms)) > 3 * est.se:
            sim_bad.append((k, est.mean, externality.inclusion_prob(k, ms)))
    ok = priv_bad == 0 and soc_bad == 0 and pig_bad == 0 and not sim_bad
    return ok, f"private {priv_bad}, social {soc_bad}, surcharge {pig_bad} mismatches; simulator misses {sim_bad}"


def c11(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 11).generator()
    worst = 0.0
    for _ in range(1000):
        th = externality.ConcaveTheta(float(rng.uniform(0.1, 1.0)), float(rng.uniform(0.5, 3.0)))
        p = externality.SpamParams(th, float(rng.uniform(1.0, 20.0)), float(rng.uniform(0.5, 5.0)))
        s, _ = externality.optimal_spam(p)
        arg, _ = oracles.numeric_spam_optimum(lambda x: externality.spam_profit(x, p), 2.0 * s + 10.0 / th.gamma)
        worst = max(worst, abs(arg - s))
    adv_bad = 0
    for _ in range(300):
        f = _loguniform(rng, 0.01, 5.0)
        tau_star = float(rng.uniform(0.0, 3.0))
        K_max = 200
        deltas = [float(x) for x in rng.uniform(0.0, 1.0, K_max)]
        W = _loguniform(rng, 0.1, 200.0)
        slope = _loguniform(rng, 0.1, 20.0)

        def benefit(K: int, W=W, slope=slope) -> float:
            return min(W, slope * K)

        p = externality.OrderingSpamParams(f, tau_star, deltas, benefit, W)
        got = externality.max_profitable_advance(p, K_max)
        want = oracles.enumerate_advance(f, tau_star, deltas, benefit, K_max)
        finite = got is None or got * f < W
        adv_bad += got != want or not finite
    ok = worst <= 1e-6 and adv_bad == 0
    return ok, f"max |s*-numeric| {worst:.1e}; advance mismatches {adv_bad}"


def c12(seed: int = SEED) -> tuple[bool, str]:
    rng = _stream(seed, 12).generator()
    worst_h = 0.0
    order_bad = 0
    for i in range(200):
        W = _loguniform(rng, 0.5, 10.0)
        w = W * float(rng.uniform(0.0, 0.95))
        pi_ba = float(rng.uniform(0.0, 0.9))
        pi_snipe = float(rng.uniform(pi_ba + 0.01, 1.0))
        rho = games.linear_rho if i % 2 == 0 else games.exponential_rho(float(rng.uniform(0.2, 5.0)))
        p = games.TimingParams(W, w, pi_ba, pi_snipe, rho)
        try:
            s_bar = games.deadline(p)
        except NoRoot:
            continue
        worst_h = max(worst_h, abs(p.h(s_bar)))
        for s in rng.uniform(0.0, 1.0, 20):
            if abs(s - s_bar) < 1e-9:
                continue
            br = games.snipe_best_response(p, p.rho_b(float(s)))
            want = games.SnipeChoice.WAIT if s < s_bar else games.SnipeChoice.SEND_NOW
            order_bad += br != want
    hand = games.deadline(games.TimingParams(1.0, 0.0, 0.4, 0.8))
    ok = worst_h <= 1e-10 and order_bad == 0 and abs(hand - 0.5) <= 1e-10
    return ok, f"max |h(s_bar)| {worst_h:.1e}; best-response mismatches {order_bad}; linear hand case {hand:.12f}"


def c13(seed: int = SEED) -> tuple[bool, str]:
    h = hazard.HazardParams(1.0, 1.0, 1.0)
    alphas = [0.0, 0.25, math.log(2.0), 1.5, 4.0]
    res = sim.check_delay_objective(h, 0.5, alphas, 1_000_000, _stream(seed, 13))
    h2 = hazard.HazardParams(2.0, 0.7, 0.4, 0.9)
    res2 = sim.check_delay_objective(h2, 1.3, alphas, 1_000_000, _stream(seed, 14))
    ok = all(r.ok for r in res + res2)
    worst = max(abs(r.mean - r.analytic) / max(r.se, 1e-12) for r in res + res2)
    return ok, f"10 (alpha, params) points, worst |z| {worst:.2f}"


CRITERIA: list[tuple[int, str, Callable[..., tuple[bool, str]]]] = [
    (1, "envelope vs numeric optimum", c1),
    (2, "two-hazard reduces to one-hazard", c2),
    (3, "drop cutoff inverts envelope", c3),
    (4, "censorship rounds vs brute force", c4),
    (5, "mixed steal equilibrium", c5),
    (6, "equal-split deterrence", c6),
    (7, "auction revenue", c7),
    (8, "PoA odds and stealability", c8),
    (9, "PDM merge properties", c9),
    (10, "multi-submission optima and inclusion", c10),
    (11, "spam optima", c11),
    (12, "snipe deadline", c12),
    (13, "delay objective generative check", c13),
]


def run_one(number: int, seed: int = SEED) -> CriterionResult:
    for n, name, fn in CRITERIA:
        if n == number:
            start = time.perf_counter()
            try:
                ok, detail = fn(seed)
            except Exception as exc:  # a crash is a failed criterion, not a crashed suite
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CriterionResult(n, name, ok, detail, time.perf_counter() - start)
    raise KeyError(number)


def run_all(seed: int = SEED, only: list[int] | None = None) -> list[CriterionResult]:
    return [run_one(n, seed) for n, _, _ in CRITERIA if only is None or n in only]
