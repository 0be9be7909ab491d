"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 unsupported combination,
4 numerical failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import atwill, buyer_side, mechanisms, montecarlo
from .distributions import Distribution, Uniform, from_spec
from .exceptions import (
    DomainError,
    MechlabError,
    RegularityError,
    ThresholdNotFoundError,
    UnsupportedDistributionError,
)
from .validation import check_delta, require_uniform

log = logging.getLogger("mechlab")

EXIT_OK, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4, 5

FIGURE_COLUMNS = {
    "prices": ["delta", "p_eafp", "p_eao", "p0_d", "theta_bar_d"],
    "profits": ["delta", "pi_eafp", "pi_epo", "pi_eao", "pi_d"],
    "appendix-c": ["delta", "pi_eao", "pi_epo", "pi_d", "pi_d1", "pi_d2"],
}
DEFAULT_GRID = (0.01, 0.99, 99)
MECHS = ("eafp", "epo", "eao", "d", "d1", "d2")


class ConfigError(MechlabError):
    pass


@dataclass
class RunConfig:
    F: Distribution = field(default_factory=Uniform)
    G: Distribution = field(default_factory=Uniform)
    delta: Optional[float] = None
    delta_grid: Optional[dict] = None
    side: str = "seller"
    seed: Optional[int] = None
    n_sim: Optional[int] = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        unknown = set(d) - {"F", "G", "delta", "delta_grid", "side", "seed", "n_sim"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(
                F=from_spec(d.get("F", "uniform")),
                G=from_spec(d.get("G", "uniform")),
                delta=None if d.get("delta") is None else float(d["delta"]),
                delta_grid=d.get("delta_grid"),
                side=d.get("side", "seller"),
                seed=None if d.get("seed") is None else int(d["seed"]),
                n_sim=None if d.get("n_sim") is None else int(d["n_sim"]),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {"F": self.F.to_spec(), "G": self.G.to_spec(), "side": self.side}
        for key in ("delta", "delta_grid", "seed", "n_sim"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out

    def validate(self):
        if self.side not in ("seller", "buyer"):
            raise ConfigError(f"side must be 'seller' or 'buyer', got {self.side!r}")
        if self.delta is not None and self.delta_grid is not None:
            raise ConfigError("give either delta or delta_grid, not both")
        if self.delta is not None:
            check_delta(self.delta)
        if self.delta_grid is not None:
            self.delta_grid = _check_grid(self.delta_grid)
        if self.n_sim is not None and self.n_sim < 1000:
            raise ConfigError("n_sim must be at least 1000")

    def grid(self) -> np.ndarray:
        g = self.delta_grid or dict(zip(("min", "max", "steps"), DEFAULT_GRID))
        return np.linspace(g["min"], g["max"], g["steps"])


def _check_grid(g) -> dict:
    try:
        g = {"min": float(g["min"]), "max": float(g["max"]), "steps": int(g["steps"])}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad delta_grid {g!r}") from exc
    if not 0.0 < g["min"] < g["max"] < 1.0:
        raise ConfigError("delta_grid needs 0 < min < max < 1")
    if g["steps"] < 2:
        raise ConfigError("delta_grid needs at least 2 steps")
    return g


def _parse_grid(text: str) -> dict:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--delta-grid expects min:max:steps, got {text!r}")
    return _check_grid(dict(zip(("min", "max", "steps"), parts)))


def load_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}") from exc
    if getattr(args, "delta", None) is not None:
        raw["delta"] = args.delta
        raw.pop("delta_grid", None)
    if getattr(args, "delta_grid", None) is not None:
        raw["delta_grid"] = _parse_grid(args.delta_grid)
        raw.pop("delta", None)
    if getattr(args, "side", None) is not None:
        raw["side"] = args.side
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "n", None) is not None:
        raw["n_sim"] = args.n
    return RunConfig.from_dict(raw)


def _need_delta(cfg: RunConfig, mech: str) -> float:
    if cfg.delta is None:
        raise ConfigError(f"mechanism {mech!r} needs --delta")
    return cfg.delta


def _solve_record(cfg: RunConfig, mech: str):
    """Solve one mechanism; return (JSON record, analytic value, outcome rule)."""
    if cfg.side == "buyer":
        if mech in ("d1", "d2"):
            raise UnsupportedDistributionError("no buyer-side at-will mechanisms")
        delta = _need_delta(cfg, mech) if mech in ("epo", "d") else cfg.delta
        sol = buyer_side.solve_buyer(mech, delta, cfg.F, cfg.G)
        return sol.to_dict(), sol.utility, montecarlo.build_buyer_rule(sol)
    if mech == "d1":
        sol = atwill.solve_d1(_need_delta(cfg, mech), cfg.F, cfg.G)
        return sol.to_dict(), sol.profit, montecarlo.build_atwill_rule(sol)
    if mech == "d2":
        sol = atwill.solve_d2(_need_delta(cfg, mech), cfg.F, cfg.G)
        return sol.to_dict(), sol.profit, montecarlo.build_atwill_rule(sol)
    delta = _need_delta(cfg, mech) if mech in ("epo", "d") else cfg.delta
    sol = mechanisms.solve(mech, cfg.F, cfg.G, delta)
    return sol.to_dict(), sol.profit, montecarlo.build_rule(sol, cfg.F, cfg.G)


def _emit_json(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    cfg = load_config(args)
    record, _, _ = _solve_record(cfg, args.mech)
    _emit_json(record, args.out)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    cfg = load_config(args)
    _emit_json(mechanisms.regime_thresholds(cfg.F, cfg.G).to_dict(), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args)
    delta = _need_delta(cfg, "compare")
    _emit_json(mechanisms.compare(cfg.F, cfg.G, delta).to_dict(), args.out)
    return EXIT_OK


def sweep_rows(F: Distribution, G: Distribution, which: str, deltas) -> List[list]:
    """Rows of figure data, one per discount factor."""
    if which == "appendix-c":
        require_uniform(F, G)
    eafp = mechanisms.solve_eafp(F, G)
    eao = mechanisms.solve_eao(F, G)
    rows = []
    for delta in deltas:
        delta = float(delta)
        dyn = mechanisms.solve_dynamic(F, G, delta)
        if which == "prices":
            rows.append([delta, eafp.price0, eao.price0, dyn.price0, dyn.theta_bar])
            continue
        epo = mechanisms.solve_epo(F, G, delta)
        if which == "profits":
            rows.append([delta, eafp.profit, epo.profit, eao.profit, dyn.profit])
        else:
            rows.append([delta, eao.profit, epo.profit, dyn.profit,
                         atwill.solve_d1(delta).profit, atwill.solve_d2(delta).profit])
    return rows


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(float(v), ".9g") for v in row])
    return buf.getvalue()


def cmd_figure(args) -> int:
    cfg = load_config(args)
    which = "appendix-c" if args.appendix_c else args.which
    text = format_csv(FIGURE_COLUMNS[which], sweep_rows(cfg.F, cfg.G, which, cfg.grid()))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    record, analytic, rule = _solve_record(cfg, args.mech)
    n = cfg.n_sim or montecarlo.DEFAULT_N
    seed = montecarlo.DEFAULT_SEED if cfg.seed is None else cfg.seed
    delta = cfg.delta if cfg.delta is not None else 1.0
    est = montecarlo.simulate(rule, cfg.F, cfg.G, delta, n=n, seed=seed)
    if cfg.side == "buyer":
        mean, se = est.buyer_surplus_mean, est.buyer_surplus_se
    else:
        mean, se = est.profit_mean, est.profit_se
    if se > 0.0:
        z = (mean - analytic) / se
    else:
        z = 0.0 if mean == analytic else math.inf
    _emit_json({"solution": record, "estimate": est.to_dict(), "analytic": analytic,
                "z": z, "pass": abs(z) <= 3.0}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mechlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve one mechanism")
    p.add_argument("--mech", choices=MECHS, required=True)
    p.add_argument("--side", choices=("seller", "buyer"))
    p.add_argument("--delta", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("thresholds", parents=[common], help="critical discount factors")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("compare", parents=[common], help="profits of all mechanisms at one delta")
    p.add_argument("--delta", type=float)
    p.set_defaults(func=cmd_compare)

    for name in ("figure", "sweep"):
        p = sub.add_parser(name, parents=[common], help="CSV figure data over a delta grid")
        p.add_argument("which", nargs="?", choices=tuple(FIGURE_COLUMNS), default="profits")
        p.add_argument("--appendix-c", action="store_true",
                       help="same as 'which=appendix-c'")
        p.add_argument("--delta-grid", help="min:max:steps (default 0.01:0.99:99)")
        p.set_defaults(func=cmd_figure)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of one mechanism")
    p.add_argument("--mech", choices=MECHS, required=True)
    p.add_argument("--side", choices=("seller", "buyer"))
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("MECHLAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsupportedDistributionError, RegularityError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ThresholdNotFoundError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MechlabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
