"""Command-line figure-data reproduction, sweeps, Monte-Carlo runs and oracle checks.

Exit codes: 0 success, 1 invalid arguments, 2 a consistency check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bell, ccp, dense, entanglement, nonlocal_content
from .errors import ConsistencyError, ResourceLimitError
from .state import NoiseKind, decohered_ghz, make_ghz

log = logging.getLogger("ghz_nonlocality")

ORACLE_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class SweepConfig:
    kind: NoiseKind = NoiseKind.DEPOLARIZING
    p_grid: list[float] = field(default_factory=lambda: parse_p_grid("0:1:0.01"))
    n_range: list[int] = field(default_factory=lambda: [2])
    trials: int = 100_000
    seed: int = 0
    oracle_check: bool = False
    output_format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if not self.p_grid or not self.n_range:
            raise UsageError("p grid and n range must be nonempty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise UsageError("noise strengths must lie in [0, 1]")
        if any(n < 2 for n in self.n_range):
            raise UsageError("party counts must be >= 2")


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for note in self.notes:
            buf.write(f"# {note}\n")
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row.get(k)) for k in self.columns})
        return buf.getvalue()

    def to_json(self, command: str) -> str:
        rows = [{k: _plain(row.get(k)) for k in self.columns} for row in self.rows]
        return json.dumps({"command": command, "columns": self.columns, "notes": self.notes, "rows": rows}, indent=2)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def parse_p_grid(text: str) -> list[float]:
    try:
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise UsageError(f"bad p grid {text!r}, expected a:b:step") from None
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise UsageError(f"bad p grid {text!r}, expected a:b:step with step > 0")
    a, b, step = parts
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def parse_n_range(text: str) -> list[int]:
    try:
        lo, hi = (int(v) for v in text.split(".."))
    except ValueError:
        raise UsageError(f"bad n range {text!r}, expected a..b") from None
    if hi < lo:
        raise UsageError(f"empty n range {text!r}")
    return list(range(lo, hi + 1))


def _map_rows(func: Callable, items, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _consistency(ok: bool, message: str) -> None:
    if not ok:
        raise ConsistencyError(message)


def cmd_fig1(cfg: SweepConfig) -> Table:
    """Two-qubit entanglement and CHSH maximum: dephasing at p vs depolarizing at p/2."""
    pd, dp = NoiseKind.PHASE_DAMPING, NoiseKind.DEPOLARIZING

    def row(p):
        s_pd = decohered_ghz(2, pd, p)
        s_d = decohered_ghz(2, dp, p / 2)
        out = {
            "p": p,
            "conc_pd": entanglement.concurrence_two_qubit(s_pd),
            "conc_d_half": entanglement.concurrence_two_qubit(s_d),
            "neg_pd": entanglement.negativity(s_pd, 1),
            "neg_d_half": entanglement.negativity(s_d, 1),
            "chsh_pd": bell.chsh_max(s_pd),
            "chsh_d_half": bell.chsh_max(s_d),
            "local_bound": 2.0,
        }
        if cfg.oracle_check:
            dev = max(
                abs(out["conc_pd"] - dense.wootters_concurrence(dense.from_structured(s_pd))),
                abs(out["conc_d_half"] - dense.wootters_concurrence(dense.from_structured(s_d))),
                abs(out["chsh_pd"] - bell.chsh_max_phase_damping(p)),
                abs(out["chsh_d_half"] - bell.chsh_max_depolarizing(p / 2)),
            )
            _consistency(dev <= ORACLE_TOL, f"fig1 oracle deviation {dev:.3g} at p={p}")
        return out

    rows = _map_rows(row, cfg.p_grid, cfg.workers)
    for r in rows:
        _consistency(r["chsh_pd"] >= r["chsh_d_half"] - 1e-12, f"CHSH ordering fails at p={r['p']}")
    return Table(
        ["p", "conc_pd", "conc_d_half", "neg_pd", "neg_d_half", "chsh_pd", "chsh_d_half", "local_bound"],
        rows,
        [
            "fig1: Bell state under phase damping (p) and depolarization (p/2)",
            "conc_*: Wootters concurrence; neg_*: negativity, sum of |negative PT eigenvalues|",
            "convention: concurrence = 2 * negativity for these Bell-diagonal states",
            "chsh_*: maximal CHSH value from the Horodecki criterion; local_bound = 2",
        ],
    )


def cmd_fig2(cfg: SweepConfig) -> Table:
    """Critical noise for Mermin violation and full separability under depolarization."""
    if cfg.kind is not NoiseKind.DEPOLARIZING:
        raise UsageError("fig2 is defined for the depolarizing channel only")

    def row(n):
        if n == 2:
            p_c, source = bell.chsh_critical_depolarizing(), "chsh"
        else:
            p_c, source = bell.mermin_critical_noise(n), "mermin"
        p_sep = entanglement.separability_threshold(n, NoiseKind.DEPOLARIZING).p
        return {"n": n, "p_c": p_c, "p_c_source": source, "p_sep": p_sep, "p_distill": None}

    rows = _map_rows(row, cfg.n_range, cfg.workers)
    for r in rows:
        _consistency(r["p_c"] < r["p_sep"], f"p_c >= p_sep at n={r['n']}")
    return Table(
        ["n", "p_c", "p_c_source", "p_sep", "p_distill"],
        rows,
        [
            "fig2: GHZ states under independent depolarization",
            "p_c: largest p with Bell violation (Mermin with X/Y settings; CHSH maximum for n=2)",
            "p_c for even n uses the even-n local bound 2^(n/2)",
            "p_sep: p where the half-versus-half negativity vanishes (bisection)",
            "p_distill: distillability threshold, not computed (out of scope)",
        ],
    )


def cmd_fig4(cfg: SweepConfig, p: float) -> Table:
    """Quantum gain, nonlocal-content bounds and negativity along odd n."""
    ns = []
    for n in cfg.n_range:
        if n % 2 == 0 or n < 3:
            log.warning("fig4: skipping n=%d (odd n >= 3 only)", n)
            continue
        ns.append(n)
    if not ns:
        raise UsageError("fig4 needs at least one odd n >= 3")

    def row(n):
        gain = ccp.quantum_gain(n, p).gain
        b = nonlocal_content.mermin_content_bounds(n, p)
        neg = entanglement.half_negativity(decohered_ghz(n, cfg.kind, p))
        return {"n": n, "gain": gain, "nl_lower": b.lower, "nl_upper": b.upper,
                "negativity_half": neg, "negativity_norm": 2 * neg}

    rows = _map_rows(row, ns, cfg.workers)
    for r in rows:
        for col in ("gain", "nl_lower", "negativity_norm"):
            _consistency(r[col] <= r["nl_upper"] + 1e-12, f"{col} exceeds the upper bound at n={r['n']}")
    if abs(p - 0.1) < 1e-12:
        gains = {r["n"]: r["gain"] for r in rows}
        peak = [n for n in (3, 5, 7, 9) if n in gains]
        if len(peak) == 4:
            _consistency(gains[3] < gains[5] < gains[7] > gains[9], "gain is not peaked at n=7")
        tail = [gains[n] for n in sorted(gains) if n >= 7]
        _consistency(all(a > b for a, b in zip(tail, tail[1:])), "gain does not decrease after n=7")
    return Table(
        ["n", "gain", "nl_lower", "nl_upper", "negativity_half", "negativity_norm"],
        rows,
        [
            f"fig4: odd n, p={p}, negativity for channel {cfg.kind.value}",
            "gain: quantum minus classical success probability of the Mermin game",
            "nl_lower / nl_upper: bounds on the nonlocal content (odd n)",
            "negativity_half: half-versus-half negativity (pure GHZ = 1/2); negativity_norm = 2 * negativity_half",
        ],
    )


def _oracle_row_check(state, n: int, row: dict) -> None:
    if n > 6:
        return
    ds = dense.from_structured(state)
    cut = list(range(entanglement.half_cut(n)))
    dev = abs(row["negativity_half"] - dense.negativity_dense(ds, cut))
    if n == 2:
        dev = max(dev, abs(row["concurrence"] - dense.wootters_concurrence(ds)))
    else:
        blochs = [o.bloch for o in (bell.PAULI_X,) * n]
        dev = max(dev, abs(bell.correlation(state, [bell.PAULI_X] * n) - dense.correlation_dense(ds, blochs)))
    _consistency(dev <= ORACLE_TOL, f"oracle deviation {dev:.3g} at n={n}, p={row['p']}")


def cmd_sweep(cfg: SweepConfig, dump: Callable | None = None) -> Table:
    """Every per-state quantity over the (n, p) grid."""
    items = [(n, p) for n in cfg.n_range for p in cfg.p_grid]

    def row(item):
        n, p = item
        s = decohered_ghz(n, cfg.kind, p)
        out = {"kind": cfg.kind.value, "n": n, "p": p, "coherence": s.coherence,
               "negativity_half": entanglement.half_negativity(s)}
        if n == 2:
            out["concurrence"] = entanglement.concurrence_two_qubit(s)
            out["bell_max"] = bell.chsh_max(s)
            out["local_bound"] = 2.0
            out["visibility"] = out["bell_max"] / 2.0
        else:
            rep = bell.mermin_report(n, p)
            out.update(bell_max=rep.value, local_bound=rep.local_bound, visibility=rep.visibility, p_c=rep.p_c)
            g = ccp.quantum_gain(n, p)
            out["gain"] = g.gain
            if n % 2:
                b = nonlocal_content.mermin_content_bounds(n, p)
                out.update(nl_lower=b.lower, nl_upper=b.upper)
        if cfg.oracle_check:
            _oracle_row_check(s, n, out)
        return out, s

    results = _map_rows(row, items, cfg.workers)
    if dump is not None:
        for out, s in results:
            dump({"kind": cfg.kind.value, "p": out["p"], **s.to_dict()})
    return Table(
        ["kind", "n", "p", "coherence", "negativity_half", "concurrence", "bell_max", "local_bound",
         "visibility", "p_c", "nl_lower", "nl_upper", "gain"],
        [r for r, _ in results],
        [
            "sweep: decohered GHZ states",
            "bell_max: CHSH maximum for n=2, Mermin value with X/Y settings for n>=3",
            "visibility: bell_max / local_bound (even n uses the local bound 2^(n/2))",
            "gain: Mermin game gain; even n uses the even-n classical success 1/2(1+1/sqrt(2^(n-2)))",
            "nl_lower / nl_upper: nonlocal-content bounds, odd n only",
        ],
    )


def cmd_game(cfg: SweepConfig, n: int, p: float, dump: Callable | None = None) -> tuple[Table, bool]:
    if cfg.trials < 1:
        raise UsageError("trials must be >= 1")
    if n % 2 == 0 or n < 3:
        raise UsageError("game needs an odd n >= 3")
    if n > bell.ENUMERATION_MAX_N:
        raise UsageError(f"game supports n <= {bell.ENUMERATION_MAX_N}")
    state = decohered_ghz(n, cfg.kind, p)
    if dump is not None:
        dump({"kind": cfg.kind.value, "p": p, **state.to_dict()})
    inst = ccp.mermin_instance(n)
    rate = ccp.simulate_game(inst, state, cfg.trials, cfg.seed, workers=cfg.workers)
    value = bell.bell_value(inst.functional, state, bell.mermin_settings(n))
    expected = ccp.success_probability(value, inst.functional.abs_sum)
    sigma = math.sqrt(expected * (1 - expected) / cfg.trials)
    if sigma > 0:
        z = (rate - expected) / sigma
    else:
        z = 0.0 if rate == expected else math.inf
    row = {"n": n, "p": p, "kind": cfg.kind.value, "trials": cfg.trials, "seed": cfg.seed,
           "rate": rate, "expected": expected, "sigma": sigma, "z": z}
    table = Table(list(row), [row], ["game: Mermin communication game, single-bit parity broadcast"])
    return table, abs(z) <= 4


def cmd_check(cfg: SweepConfig, kinds: list[NoiseKind]) -> tuple[Table, bool]:
    """Structured formulas against the dense oracle; max deviation per suite."""
    cap = dense.DENSE_CAP
    if max(cfg.n_range) > cap:
        raise ResourceLimitError(f"check is limited to n <= {cap}")
    dev = {"channel": 0.0, "negativity": 0.0, "correlation": 0.0, "concurrence": 0.0,
           "mermin": 0.0, "outcome_distribution": 0.0}
    rng = np.random.default_rng(cfg.seed)
    for kind in kinds:
        for n in cfg.n_range:
            for p in cfg.p_grid:
                s = decohered_ghz(n, kind, p)
                ds = dense.from_structured(s)
                ref = dense.apply_channel_dense(dense.ghz_dense(n), kind, p)
                dev["channel"] = max(dev["channel"], float(np.max(np.abs(ds.matrix - ref.matrix))))
                for a in range(1, n):
                    d = abs(entanglement.negativity(s, a) - dense.negativity_dense(ref, range(a)))
                    dev["negativity"] = max(dev["negativity"], d)
                obs = [bell.Observable.of(*rng.normal(size=3), normalize=True) for _ in range(n)]
                d = abs(bell.correlation(s, obs) - dense.correlation_dense(ref, [o.bloch for o in obs]))
                dev["correlation"] = max(dev["correlation"], d)
                if n == 2:
                    d = abs(entanglement.concurrence_two_qubit(s) - dense.wootters_concurrence(ref))
                    dev["concurrence"] = max(dev["concurrence"], d)
                else:
                    enum_v = bell.bell_value_enumerated(bell.mermin_functional(n), s, bell.mermin_settings(n))
                    blochs = [(o0.bloch, o1.bloch) for o0, o1 in bell.mermin_settings(n)]
                    g = bell.mermin_functional(n).table()
                    dense_v = math.fsum(
                        g[i] * dense.correlation_dense(ref, [blochs[j][x] for j, x in enumerate(bits)])
                        for i, bits in enumerate(bell.setting_bits(n)) if g[i] != 0
                    )
                    d = max(abs(enum_v - dense_v), abs(enum_v - bell.mermin_value(n, p)))
                    dev["mermin"] = max(dev["mermin"], d)
                if n == 3:
                    xy = [bell.PAULI_X, bell.PAULI_Y, bell.PAULI_Y]
                    c = bell.correlation(s, xy)
                    probs = dense.outcome_probabilities_dense(ref, [o.bloch for o in xy])
                    d = float(np.max(np.abs(ccp.outcome_distribution(c, 3) - probs)))
                    dev["outcome_distribution"] = max(dev["outcome_distribution"], d)
    rows = [{"suite": k, "max_deviation": v, "pass": v <= ORACLE_TOL} for k, v in dev.items()]
    table = Table(["suite", "max_deviation", "pass"], rows,
                  [f"check: n in {cfg.n_range[0]}..{cfg.n_range[-1]}, kinds {[k.value for k in kinds]}, "
                   f"{len(cfg.p_grid)} p values, tolerance {ORACLE_TOL}"])
    return table, all(r["pass"] for r in rows)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--kind", choices=["d", "pd"], help="noise channel (depolarizing or phase damping)")
    common.add_argument("--p", type=float, help="single noise strength")
    common.add_argument("--p-grid", help="noise grid a:b:step (inclusive)")
    common.add_argument("--n", type=int, help="single party count")
    common.add_argument("--n-range", help="party counts a..b (inclusive)")
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--oracle-check", action="store_true", help="cross-check rows against dense matrices")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--dump-state", nargs="?", const="-", metavar="PATH",
                        help="write the structured states as JSON lines (default: stderr)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ghz-nonlocality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in [
        ("fig1", "two-qubit concurrence and CHSH maximum, dephasing vs depolarization"),
        ("fig2", "critical noise for Mermin violation and separability vs n"),
        ("fig4", "quantum gain, nonlocal-content bounds and negativity vs odd n"),
        ("sweep", "all quantities over an (n, p) grid"),
        ("game", "Monte-Carlo run of the communication game"),
        ("check", "structured formulas vs the dense oracle"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _config(args, default_kind="d", default_grid="0:1:0.01", default_n="2..2") -> SweepConfig:
    kind = NoiseKind.parse(args.kind or default_kind)
    if args.p is not None:
        p_grid = [args.p]
    else:
        p_grid = parse_p_grid(args.p_grid or default_grid)
    n_range = [args.n] if args.n is not None else parse_n_range(args.n_range or default_n)
    return SweepConfig(kind, p_grid, n_range, args.trials, args.seed, args.oracle_check, args.format,
                       max(1, args.workers))


def run(args) -> int:
    dump_lines: list[str] = []
    dump = (lambda d: dump_lines.append(json.dumps(d))) if args.dump_state else None
    status = 0
    cmd = args.command
    if cmd == "fig1":
        table = cmd_fig1(_config(args))
    elif cmd == "fig2":
        table = cmd_fig2(_config(args, default_n="2..50"))
    elif cmd == "fig4":
        cfg = _config(args, default_n="3..41")
        table = cmd_fig4(cfg, 0.1 if args.p is None else args.p)
    elif cmd == "sweep":
        table = cmd_sweep(_config(args, default_n="2..8"), dump)
    elif cmd == "game":
        cfg = _config(args, default_n="3..3")
        table, ok = cmd_game(cfg, cfg.n_range[0], 0.0 if args.p is None else args.p, dump)
        status = 0 if ok else 2
    elif cmd == "check":
        cfg = _config(args, default_grid="0:1:0.1", default_n="2..6")
        kinds = [cfg.kind] if args.kind else list(NoiseKind)
        table, ok = cmd_check(cfg, kinds)
        status = 0 if ok else 2
    else:  # pragma: no cover
        raise UsageError(f"unknown command {cmd}")

    text = table.to_json(cmd) if args.format == "json" else table.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if dump_lines:
        payload = "\n".join(dump_lines) + "\n"
        if args.dump_state == "-":
            sys.stderr.write(payload)
        else:
            with open(args.dump_state, "w") as fh:
                fh.write(payload)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except (UsageError, ValueError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"consistency check failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
