"""Command-line front end.

Every subcommand reads a TOML config whose ``kind`` names the subcommand,
writes one CSV (to ``--out`` or stdout) and, when ``--out`` is given, a JSON
manifest next to it at ``<out>.manifest.json``.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__, auction, externality, games, hazard, poa, scheduler, sim, validate
from .errors import ConfigError, MevError, NoRoot
from .numeric import RngStream

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_DOMAIN, EXIT_CRITERIA = 0, 1, 2, 3, 4


# -- config access -------------------------------------------------------------

class Section:
    """Typed view of one config table; every failure is a ConfigError."""

    def __init__(self, data: dict, where: str = "config"):
        if not isinstance(data, dict):
            raise ConfigError(f"{where} must be a table")
        self.data = data
        self.where = where

    _MISSING = object()

    def _get(self, key: str, default: Any):
        if key in self.data:
            return self.data[key]
        if default is Section._MISSING:
            raise ConfigError(f"{self.where}: missing key {key!r}")
        return default

    def num(self, key: str, default: Any = _MISSING) -> float:
        v = self._get(key, default)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{self.where}.{key}: expected a number, got {v!r}")
        return float(v)

    def int(self, key: str, default: Any = _MISSING) -> int:
        v = self._get(key, default)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{self.where}.{key}: expected an integer, got {v!r}")
        return v

    def str(self, key: str, default: Any = _MISSING) -> str:
        v = self._get(key, default)
        if v is not None and not isinstance(v, str):
            raise ConfigError(f"{self.where}.{key}: expected a string, got {v!r}")
        return v

    def nums(self, key: str, default: Any = _MISSING) -> list[float]:
        v = self._get(key, default)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            v = [v]
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise ConfigError(f"{self.where}.{key}: expected a list of numbers")
        return [float(x) for x in v]

    def ints(self, key: str, default: Any = _MISSING) -> list[int]:
        v = self._get(key, default)
        if isinstance(v, int) and not isinstance(v, bool):
            v = [v]
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
            raise ConfigError(f"{self.where}.{key}: expected a list of integers")
        return v

    def table(self, key: str, default: Any = _MISSING) -> "Section | None":
        v = self._get(key, default)
        return None if v is None else Section(v, f"{self.where}.{key}")

    def tables(self, key: str) -> list["Section"]:
        v = self._get(key, Section._MISSING)
        if not isinstance(v, list):
            raise ConfigError(f"{self.where}.{key}: expected an array of tables")
        return [Section(x, f"{self.where}.{key}[{i}]") for i, x in enumerate(v)]

    def has(self, key: str) -> bool:
        return key in self.data


def load_config(path: str | None, kind: str) -> tuple[Section, Path]:
    if path is None:
        raise ConfigError(f"{kind} needs --config")
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    found = data.get("kind")
    if found != kind:
        raise ConfigError(f"config kind {found!r} does not match subcommand {kind!r}")
    return Section(data), p.parent


def hazard_from(sec: Section) -> hazard.HazardParams:
    return hazard.HazardParams(sec.num("A"), sec.num("k"), sec.num("lam"), sec.num("delta", None))


def tau_grid(sec: Section) -> list[float]:
    if sec.has("taus"):
        return sec.nums("taus")
    g = sec.table("tau_grid")
    lo, hi, n = g.num("start"), g.num("stop"), g.int("num")
    if n < 1:
        raise ConfigError("tau_grid.num must be >= 1")
    if g.str("spacing", "linear") == "log":
        if lo <= 0:
            raise ConfigError("log tau_grid needs start > 0")
        return [float(x) for x in np.geomspace(lo, hi, n)]
    return [float(x) for x in np.linspace(lo, hi, n)]


# -- output --------------------------------------------------------------------

def fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.9g" % v
    return str(v)


class Table:
    def __init__(self, header: list[str]):
        self.header = header
        self.rows: list[list[str]] = []
        self.summary: dict[str, Any] = {}

    def add(self, *values: Any) -> None:
        if len(values) != len(self.header):
            raise AssertionError("row width does not match header")
        self.rows.append([fmt(v) for v in values])

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


# -- subcommands ---------------------------------------------------------------

def cmd_envelope(cfg: Section, args, base: Path) -> Table:
    p = hazard_from(cfg)
    beta = cfg.num("beta", None)
    tau_d = hazard.drop_cutoff(beta, p) if beta is not None else None
    t = Table(["tau", "envelope", "alpha_star", "tau_dagger", "tau_d"])
    thr = hazard.immediate_threshold(p)
    for tau in tau_grid(cfg):
        ch = hazard.optimal_delay(tau, p)
        t.add(tau, hazard.envelope(tau, p), "sat" if ch.saturated else ch.alpha, thr, tau_d)
    return t


def cmd_censorship(cfg: Section, args, base: Path) -> Table:
    v, c, s = cfg.num("v"), cfg.num("c"), cfg.int("s")
    t = Table(["Q", "k_opt", "k_heuristic", "utility_opt"])
    for Q in cfg.nums("Q"):
        p = games.CensorUserParams(v, c, s, Q)
        k = games.optimal_rounds(p)
        t.add(Q, k, games.heuristic_rounds(v, c), games.user_utility(k, p))
    return t


def cmd_steal(cfg: Section, args, base: Path) -> Table:
    t = Table(["m", "win_prob", "prize", "profitable", "p_star", "n_bar"])
    for m in cfg.ints("m", [1]):
        p = games.StealParams(
            cfg.num("sigma"), cfg.num("rho"), cfg.num("phi"), cfg.num("tau"), cfg.num("delta_x", 0.0), m
        )
        n_bar = games.anti_steal_multiplicity(p.prize, p.phi) if p.phi > 0 else None
        t.add(m, p.win, p.prize, games.steal_profitable(p), games.steal_mixed_equilibrium(p), n_bar)
    return t


def cmd_auction(cfg: Section, args, base: Path) -> Table:
    vbar = cfg.num("vbar")
    t = Table(["m", "vbar", "reserve", "revenue_no_reserve", "revenue_opt", "revenue_numeric"])
    for m in cfg.ints("m"):
        num = auction.myerson_revenue_numeric(auction.AuctionSpec(m, auction.Uniform(vbar)))
        t.add(m, vbar, auction.uniform_reserve(vbar), auction.uniform_revenue(vbar, 0.0, m), auction.uniform_opt_revenue(vbar, m), num)
    keep = cfg.table("keep", None)
    if keep is not None:
        h = hazard_from(keep)
        tau = keep.num("tau")
        mode = keep.str("mode", "posted")
        if mode == "posted":
            curve = lambda a: auction.posted_price_revenue(tau, a, h)  # noqa: E731
        elif mode == "uniform":
            kv, km = keep.num("vbar"), keep.int("m")
            curve = lambda a: auction.uniform_opt_revenue(kv * math.exp(-h.lam * a), km)  # noqa: E731
        else:
            raise ConfigError(f"keep.mode must be 'posted' or 'uniform', got {mode!r}")
        choice, value = auction.keep_vs_auction(tau, h, curve, keep.nums("alphas", [0.0]))
        t.summary.update(choice=choice.value, value=value, keep_value=hazard.envelope(tau, h))
    return t


def _rho_from(cfg: Section) -> games.RhoFn:
    kind = cfg.str("rho", "linear")
    if kind == "linear":
        return games.linear_rho
    if kind == "exponential":
        return games.exponential_rho(cfg.num("gamma"))
    raise ConfigError(f"rho must be 'linear' or 'exponential', got {kind!r}")


def cmd_timing(cfg: Section, args, base: Path) -> Table:
    p = games.TimingParams(cfg.num("W"), cfg.num("w"), cfg.num("pi_ba"), cfg.num("pi_snipe"), _rho_from(cfg))
    t = Table(["s", "rho_b", "h", "best_response"])
    n = cfg.int("grid", 11)
    if n < 2:
        raise ConfigError("grid must be >= 2")
    for s in np.linspace(0.0, 1.0, n):
        r = p.rho_b(float(s))
        t.add(float(s), r, p.h(float(s)), games.snipe_best_response(p, min(max(r, 0.0), 1.0)).value)
    try:
        t.summary["deadline"] = games.deadline(p)
    except NoRoot as exc:
        t.summary["deadline"] = None
        t.summary["deadline_note"] = str(exc)
    return t


def cmd_poa(cfg: Section, args, base: Path) -> Table:
    mu_i, mu_j = cfg.num("mu_i"), cfg.num("mu_j")
    t = Table(["ell", "mu_i", "mu_j", "budget", "success_i", "success_j", "race_j_first", "stealability_bound"])
    for ell in cfg.ints("ell"):
        for b in cfg.nums("budgets"):
            bound = poa.stealability_bound(poa.RaceParams(ell, mu_i, mu_j, b, b))
            t.add(ell, mu_i, mu_j, b, poa.poa_success(ell, mu_i, b), poa.poa_success(ell, mu_j, b), poa.race_prob(ell, mu_i, mu_j), bound)
    return t


def cmd_spam(cfg: Section, args, base: Path) -> Table:
    t = Table(["K", "cost", "benefit", "profitable"])
    da = cfg.table("da", None)
    if da is not None:
        th = da.table("theta")
        kind = th.str("kind")
        if kind == "concave":
            theta = externality.ConcaveTheta(th.num("theta_max"), th.num("gamma"))
        elif kind == "cliff":
            theta = externality.CliffTheta(th.num("s_cliff"), th.num("theta_post"))
        else:
            raise ConfigError(f"theta.kind must be 'concave' or 'cliff', got {kind!r}")
        s, profit = externality.optimal_spam(externality.SpamParams(theta, da.num("R_x"), da.num("c_da")))
        t.summary.update(s_star=s, spam_profit=profit)
    order = cfg.table("ordering", None)
    if order is not None:
        K_max = order.int("K_max")
        deltas = order.nums("deltas") if order.has("deltas") else [order.num("delta", 0.0)] * K_max
        W, slope = order.num("W"), order.num("slope")
        benefit = lambda K: min(W, slope * K)  # noqa: E731
        p = externality.OrderingSpamParams(order.num("f"), order.num("tau_star"), deltas, benefit, W)
        for K in range(1, K_max + 1):
            cost = externality.ordering_spam_cost(K, p)
            t.add(K, cost, benefit(K), benefit(K) > cost)
        t.summary["max_profitable_advance"] = externality.max_profitable_advance(p, K_max)
    return t


def multisub_from(cfg: Section) -> externality.MultiSubParams:
    if cfg.has("e_slope"):
        e_model = externality.LinearExternality(cfg.num("e_slope"))
    else:
        e_model = externality.QuadraticExternality(cfg.num("e2", 0.0))
    props = cfg.table("homogeneous", None)
    if props is not None:
        proposers = externality.Homogeneous(props.num("p"), props.num("pi"))
    else:
        proposers = [(s.num("p"), s.num("pi")) for s in cfg.tables("proposers")]
    reorder = bool(cfg.data.get("reorder", False))
    return externality.MultiSubParams(cfg.num("v"), cfg.num("c"), proposers, cfg.num("eta", 0.0), e_model, reorder)


def cmd_multisub(cfg: Section, args, base: Path) -> Table:
    p = multisub_from(cfg)
    K_max = cfg.int("K_max")
    t = Table(["k", "psi", "private_utility", "social_utility", "surcharge"])
    for k in range(K_max + 1):
        t.add(k, externality.inclusion_prob(k, p), externality.private_utility(k, p), externality.social_utility(k, p), externality.pigou_surcharge(k, p))
    t.summary.update(k_private=externality.private_opt_k(p, K_max), k_social=externality.social_opt_k(p, K_max))
    return t


def cmd_schedule(cfg: Section, args, base: Path) -> Table:
    path = base / cfg.str("txs")
    try:
        with open(path, encoding="utf-8") as fh:
            txs = scheduler.parse_tx_file(fh, cfg.str("epoch_seed", ""))
    except OSError as exc:
        raise ConfigError(f"cannot read transaction file {path}: {exc.strerror}") from None
    ranks = cfg.table("ranks")
    rank_map = {}
    for k in ranks.data:
        rank_map[k] = ranks.int(k)
    res = scheduler.pdm_merge(txs, rank_map, cfg.str("order_by", "priority"))
    t = Table(["section", "key", "value"])
    for i, tid in enumerate(res.order):
        t.add("order", i, tid)
    for tid in res.pruned:
        lid = next(tx.logical_id for tx in txs if tx.id == tid)
        t.add("pruned", tid, res.executed[lid])
    for prop in sorted(res.payouts):
        t.add("payout", prop, res.payouts[prop])
    for label, ids in (("cycle", res.rejected_cycles), ("dependent", res.rejected_dependents), ("dangling", res.rejected_dangling)):
        for tid in sorted(ids):
            t.add("rejected", tid, label)
    t.add("burned", "", res.burned)
    return t


def tick_from(cfg: Section) -> sim.TickConfig:
    props = [
        sim.ProposerCfg(
            s.str("id"), s.int("rank"), s.num("mu"), s.num("budget"), s.num("censor_prob", 0.0), s.num("publish_latency", 0.0)
        )
        for s in cfg.tables("proposers")
    ]
    w = cfg.table("workload", {})
    workload = sim.Workload(
        w.int("n_txs", 0), w.int("tip_min", 1), w.int("tip_max", 10), w.num("dep_prob", 0.0), w.int("copies", 1), w.str("epoch_seed", "epoch")
    )
    th = cfg.table("stealing", {})
    strategy = sim.ThiefStrategy(th.str("strategy", "none"), th.num("p", 0.0))
    thieves = th.data.get("ids")
    haz = cfg.table("hazard", None)
    return sim.TickConfig(
        proposers=props,
        ell=cfg.int("ell", 1),
        capacity=cfg.int("capacity", None),
        workload=workload,
        thief_strategy=strategy,
        thieves=thieves,
        observation_latency=cfg.num("observation_latency", 0.0),
        ordering=cfg.str("ordering", "priority"),
        hazard=hazard_from(haz) if haz is not None else None,
        drop_beta=haz.num("beta") if haz is not None else None,
    )


def cmd_simulate(cfg: Section, args, base: Path) -> Table:
    mode = cfg.str("mode", "tick")
    seed = args.seed if args.seed is not None else cfg.int("seed", 0)
    trials = args.trials if args.trials is not None else cfg.int("trials", 1000)
    threads = args.threads or 1
    stream = RngStream(seed, 0)
    if mode == "tick":
        tc = tick_from(cfg)
        t = Table(["trial", "blocks_made", "executed", "pruned", "rejected", "payout_total", "burned"])
        for i in range(trials):
            out = sim.run_tick(tc, stream.spawn(i))
            m = out.merge
            t.add(i, len(out.made_tick), len(m.order), len(m.pruned), len(m.rejected), sum(m.payouts.values()), m.burned)
        return t
    if mode == "sigma_rho":
        tc = tick_from(cfg)
        s, r = sim.estimate_sigma_rho(tc, cfg.str("victim"), cfg.str("thief"), trials, stream, threads)
        t = Table(["estimate", "mean", "se", "trials"])
        t.add("sigma", s.mean, s.se, s.trials)
        t.add("rho", r.mean, r.se, r.trials)
        return t
    if mode == "inclusion":
        tc = tick_from(cfg)
        t = Table(["k", "psi_hat", "se", "trials"])
        for i, k in enumerate(cfg.ints("ks")):
            e = sim.estimate_inclusion(tc, k, trials, stream.spawn(i), threads)
            t.add(k, e.mean, e.se, e.trials)
        return t
    if mode == "delay":
        h = hazard_from(cfg.table("hazard"))
        t = Table(["alpha", "mean", "se", "analytic"])
        for r in sim.check_delay_objective(h, cfg.num("tau"), cfg.nums("alphas"), trials, stream):
            t.add(r.alpha, r.mean, r.se, r.analytic)
        return t
    if mode == "equilibrium":
        st = cfg.table("steal")
        p = games.StealParams(st.num("sigma"), st.num("rho"), st.num("phi"), st.num("tau"), st.num("delta_x", 0.0), st.int("m"))
        ps = games.steal_mixed_equilibrium(p)
        devs = cfg.nums("deviations", [0.0, ps / 2, ps, (1 + ps) / 2, 1.0])
        t = Table(["q", "gain", "se"])
        for r in sim.check_mixed_equilibrium(p, ps, devs, trials, stream):
            t.add(r.q, r.gain, r.se)
        t.summary["p_star"] = ps
        return t
    raise ConfigError(f"unknown simulate mode {mode!r}")


def cmd_validate(cfg: Section | None, args, base: Path) -> Table:
    seed = args.seed if args.seed is not None else (cfg.int("seed", validate.SEED) if cfg else validate.SEED)
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",") if x]
        except ValueError:
            raise ConfigError(f"--only expects comma-separated criterion numbers, got {args.only!r}") from None
    t = Table(["criterion", "name", "passed", "seconds", "detail"])
    for r in validate.run_all(seed, only):
        print(r.line(), file=sys.stderr, flush=True)
        t.add(r.number, r.name, r.passed, round(r.seconds, 3), r.detail)
    t.summary["all_passed"] = all(row[2] == "true" for row in t.rows)
    return t


COMMANDS: dict[str, tuple[Callable, str]] = {
    "envelope": (cmd_envelope, "sweep tips: delay envelope, optimal delay, thresholds"),
    "censorship": (cmd_censorship, "re-broadcast rounds against censoring proposers"),
    "steal": (cmd_steal, "steal threshold, mixed equilibrium, deterrent multiplicity"),
    "auction": (cmd_auction, "reserve auction revenues and keep-vs-auction"),
    "timing": (cmd_timing, "snipe best response and deadline"),
    "poa": (cmd_poa, "availability-certificate odds and stealability bound"),
    "spam": (cmd_spam, "spam optimum and ordering-spam cost table"),
    "multisub": (cmd_multisub, "multi-submission inclusion, optima and surcharge"),
    "schedule": (cmd_schedule, "merge a transaction file"),
    "simulate": (cmd_simulate, "Monte Carlo tick simulator and estimators"),
    "validate": (cmd_validate, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcpmev", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="TOML config with kind = %r" % name)
        sp.add_argument("--out", help="CSV output path (default: stdout)")
        sp.add_argument("--seed", type=int, help="random seed (overrides the config)")
        sp.add_argument("--trials", type=int, help="Monte Carlo trials (overrides the config)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
        if name == "validate":
            sp.add_argument("--only", help="comma-separated criterion numbers")
    return ap


def write_outputs(table: Table, args, kind: str, seed: int | None) -> None:
    text = table.render()
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text, encoding="utf-8")
    manifest = {
        "subcommand": kind,
        "config": args.config,
        "output": str(out),
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "summary": table.summary,
    }
    Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=fmt) + "\n", encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    kind = args.command
    fn = COMMANDS[kind][0]
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.trials is not None and args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if kind == "validate" and args.config is None:
            cfg, base = None, Path(".")
        else:
            cfg, base = load_config(args.config, kind)
        table = fn(cfg, args, base)
        seed = args.seed if args.seed is not None else (cfg.data.get("seed") if cfg else None)
        write_outputs(table, args, kind, seed)
        for k, v in table.summary.items():
            print(f"{k}: {fmt(v)}", file=sys.stderr)
    except ConfigError as exc:
        print(f"mcpmev {kind}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MevError as exc:
        print(f"mcpmev {kind}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # noqa: BLE001
        print(f"mcpmev {kind}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if kind == "validate" and not table.summary.get("all_passed", False):
        return EXIT_CRITERIA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
