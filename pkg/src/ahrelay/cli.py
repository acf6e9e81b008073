"""Command-line sweeps over the analytic engine and the BER simulator.

Each command writes one row per grid point (CSV or JSON) when ``--output``
is given, and always prints a one-line ``key=value`` summary.

Exit status: 0 ok, 2 configuration / input error, 3 infeasible scenario,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .catalog import CATALOG_ENV, load_catalog
from .errors import (
    AhRelayError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NoCoverageError,
    NotDefinedError,
    UnknownEntryError,
)
from .fading import FadingModel
from .propagation import device_preset, deployment, max_range, received_power
from .rate import RateQuery, max_distance_at_rate, max_rate_at_distance
from .relay import hop_rates, relay_max_distance_at_rate, relay_max_range
from .scenario import Grid, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

COMMANDS = ("fade-margin", "range", "rate", "relay-range", "relay-rate", "ber-sim", "catalog")


@dataclass
class SweepRequest:
    command: str
    scenario_path: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "csv"
    grid: Optional[Grid] = None
    gnuplot_stub: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.output_path is not None:
            parent = Path(self.output_path).resolve().parent
            if not parent.is_dir():
                raise ConfigError(f"output directory does not exist: {parent}")


@dataclass
class SweepResult:
    columns: List[str]
    rows: List[List[Any]]
    summary: Dict[str, Any]


def _fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _summary_line(summary: Dict[str, Any]) -> str:
    parts = []
    for k, v in summary.items():
        if isinstance(v, float):
            if k.endswith("_m"):
                v = f"{v:.1f}"
            elif k.endswith("_db") or k.endswith("_dbm"):
                v = f"{v:.2f}"
            else:
                v = f"{v:.4g}"
        parts.append(f"{k}={v}")
    return " ".join(parts)


def render(result: SweepResult, fmt: str) -> str:
    if fmt == "json":
        rows = [dict(zip(result.columns, (float(v) if isinstance(v, np.floating) else v for v in r))) for r in result.rows]
        return json.dumps({"summary": result.summary, "rows": rows}, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for r in result.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def gnuplot_stub(result: SweepResult, data_path: str, command: str) -> str:
    x, ys = result.columns[0], result.columns[1:]
    logy = command in ("ber-sim", "rate", "relay-rate")
    lines = [
        f"# plot script for `{command}` output",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
        f"set xlabel '{x}'",
    ]
    if logy:
        lines.append("set logscale y")
    plots = ", ".join(f"'{data_path}' using 1:{i + 2} with linespoints" for i in range(len(ys)))
    lines.append(f"plot {plots}")
    return "\n".join(lines) + "\n"


def _fading(name: str, k_db: float) -> FadingModel:
    name = name.lower()
    return FadingModel(name, k_db if name == "rician" else None)


def _default_rx(tx: str) -> str:
    return "ap-eu" if tx.lower() == "st" else "st"


def _cmd_fade_margin(req: SweepRequest, catalog) -> SweepResult:
    o = req.options
    model = _fading(o["model"], o["k_db"])
    if model.kind == "none":
        raise DomainError("fade-margin needs --model rayleigh or rician")
    fm = model.fade_margin(o["pout"])
    rows = []
    if req.grid is not None:
        for p in req.grid.values():
            if 0.0 < p < 1.0:
                rows.append([float(p), model.fade_margin(float(p))])
    else:
        rows.append([o["pout"], fm])
    return SweepResult(["p_out", "fm_db"], rows, {"fm_db": fm})


def _cmd_range(req: SweepRequest, catalog) -> SweepResult:
    o = req.options
    tx = device_preset(o["tx"], catalog)
    rx = device_preset(o["rx"] or _default_rx(o["tx"]), catalog)
    if o["tx_power"] is not None:
        tx = tx.with_power(o["tx_power"])
    dep = deployment(o["deploy"])
    mds = o["mds"] if o["mds"] is not None else catalog.mcs_lookup(o["mcs"], o["bw"]).mds
    fm = 0.0 if o["pout"] == 0 else _fading(o["fading"], o["k_db"]).fade_margin(o["pout"])
    d_max = max_range(tx, rx, dep, mds, fm)
    grid = req.grid or Grid(10.0, 1500.0, 10.0)
    rows = [[float(d), received_power(tx, rx, dep, float(d), fm), mds] for d in grid.values() if d >= 1.0]
    return SweepResult(["distance_m", "prx_dbm", "mds_dbm"], rows, {"max_range_m": d_max, "fm_db": fm})


def _cmd_rate(req: SweepRequest, catalog) -> SweepResult:
    o = req.options
    tx = device_preset(o["tx"], catalog)
    rx = device_preset(o["rx"] or _default_rx(o["tx"]), catalog)
    if o["tx_power"] is not None:
        tx = tx.with_power(o["tx_power"])
    dep = deployment(o["deploy"])
    fading = _fading(o["fading"], o["k_db"])
    q = RateQuery.from_bytes(o["packet_bytes"], o["per"], o["coding_gain"])
    grid = req.grid or Grid(10.0, 1500.0, 10.0)
    d = grid.values()
    d = d[d >= 1.0]
    r = np.atleast_1d(max_rate_at_distance(tx, rx, dep, fading, o["pout"], d, q))
    if o["clamp_mcs"] is not None:
        r = np.minimum(r, catalog.mcs_lookup(o["clamp_mcs"], o["bw"]).rate_bps)
    rows = [[float(a), float(b)] for a, b in zip(d, r)]
    summary = {"max_distance_m": max_distance_at_rate(tx, rx, dep, fading, o["pout"], q, o["target"])}
    return SweepResult(["distance_m", "rate_bps"], rows, summary)


def _scenario(req: SweepRequest):
    if not req.scenario_path:
        raise ConfigError(f"{req.command} needs --scenario")
    sf = load_scenario(req.scenario_path)
    s = sf.scenario
    o = req.options
    if o.get("pout") is not None:
        s = replace(s, p_out_total=o["pout"])
    if o.get("ap_rs_distance") is not None:
        s = replace(s, ap_rs_distance=o["ap_rs_distance"])
    return sf, s


def _cmd_relay_range(req: SweepRequest, catalog) -> SweepResult:
    sf, s = _scenario(req)
    o = req.options
    mds = o["mds"] if o["mds"] is not None else catalog.mcs_lookup(s.mcs, 1).mds
    res = relay_max_range(s, mds)
    grid = req.grid or sf.grid or Grid(10.0, 600.0, 10.0)
    fixed, swept = s.fixed_link, s.swept_link
    p_fixed = received_power(fixed.tx, fixed.rx, fixed.deployment, s.ap_rs_distance, fixed.fade_margin)
    rows = []
    for d in grid.values():
        if d < 1.0:
            continue
        p_swept = received_power(swept.tx, swept.rx, swept.deployment, float(d), swept.fade_margin)
        rows.append([float(d), min(p_fixed, p_swept), p_fixed, p_swept, mds])
    summary = {
        "rs_st_max_m": res.rs_st_max,
        "total_max_m": res.total_max,
        "fm1_db": res.per_hop_fm[0],
        "fm2_db": res.per_hop_fm[1],
    }
    return SweepResult(["rs_st_distance_m", "min_prx_dbm", "ap_rs_prx_dbm", "rs_st_prx_dbm", "mds_dbm"], rows, summary)


def _cmd_relay_rate(req: SweepRequest, catalog) -> SweepResult:
    sf, s = _scenario(req)
    o = req.options
    q = sf.rate or RateQuery.from_bytes(256, 0.1)
    if o["packet_bytes"] is not None or o["coding_gain"] is not None or o["per"] is not None:
        q = RateQuery.from_bytes(
            o["packet_bytes"] if o["packet_bytes"] is not None else q.packet_length // 8,
            o["per"] if o["per"] is not None else q.target_per,
            o["coding_gain"] if o["coding_gain"] is not None else q.coding_gain,
        )
    target = o["target"] if o["target"] is not None else (sf.target_bps or 1e5)
    grid = req.grid or sf.grid or Grid(10.0, 600.0, 10.0)
    d = grid.values()
    d = d[d >= 1.0]
    r1, r2 = hop_rates(s, q, d)
    r = 0.5 * np.minimum(r1, r2)
    rows = [[float(a), float(b), float(c), float(e)] for a, b, c, e in zip(d, r1, r2, r)]
    d_max = relay_max_distance_at_rate(s, q, target)
    summary = {f"hop{s.swept_hop}_max_m": d_max, "total_m": d_max + s.ap_rs_distance}
    return SweepResult(["rs_st_distance_m", "hop1_bps", "hop2_bps", "rate_bps"], rows, summary)


def _cmd_ber_sim(req: SweepRequest, catalog) -> SweepResult:
    from .phy.channel import TYPICAL_URBAN, PowerDelayProfile
    from .phy.simulate import CSV_COLUMNS, SimConfig, simulate_relay

    sf, s = _scenario(req)
    o = req.options
    st = sf.sim
    pdp = TYPICAL_URBAN
    if st.pdp_delays is not None:
        pdp = PowerDelayProfile.normalized(st.pdp_delays, st.pdp_powers, name="custom")
    grid = req.grid or sf.grid
    if grid is None:
        raise ConfigError("ber-sim needs a distance grid ([grid] section or --grid)")
    cfg = SimConfig(
        scenario=s,
        distance_grid=tuple(float(x) for x in grid.values() if x >= 1.0),
        mcs=o["mcs"] if o["mcs"] is not None else (st.mcs if st.mcs is not None else s.mcs),
        pdp=pdp,
        trials=o["trials"] or st.trials,
        master_seed=o["seed"] if o["seed"] is not None else st.seed,
        min_errors=st.min_errors,
        chunk_trials=st.chunk_trials,
        symbols_per_trial=st.symbols_per_trial,
        repetition_fading=o["repetition_fading"] or st.repetition_fading,
    )
    workers = o["workers"] if o["workers"] is not None else st.workers
    est = simulate_relay(cfg, workers=workers)
    rows = [[e.distance, e.ber, e.bit_count, e.ci_halfwidth] for e in est]
    summary = {"points": len(est), "mcs": cfg.mcs, "max_ber": max(e.ber for e in est)}
    return SweepResult(list(CSV_COLUMNS), rows, summary)


def _cmd_catalog(req: SweepRequest, catalog) -> SweepResult:
    o = req.options
    if o["region"]:
        dom = catalog.regulatory_lookup(o["region"])
        rows = [[dom.region, f"{lo:g}-{hi:g}", "; ".join(f"{e:g}" for e in dom.erp_limits),
                 "; ".join(f"{b:g}" for b in dom.bandwidths)] for lo, hi in dom.bands]
        return SweepResult(["region", "band_mhz", "erp_mw", "bandwidths_mhz"], rows,
                           {"region": dom.region.replace(" ", "_"), "max_erp_dbm": dom.max_erp_dbm})
    if o["mcs"] is not None:
        view = catalog.mcs_lookup(o["mcs"], o["bw"])
        try:
            mds = view.mds
        except NotDefinedError:
            mds = None
        summary = {"mcs": o["mcs"], "bw_mhz": o["bw"], "rate_mbps": view.rate_mbps}
        if mds is not None:
            summary["mds_dbm"] = mds
        return SweepResult(["mcs", "bw_mhz", "rate_mbps", "mds_dbm"],
                           [[o["mcs"], o["bw"], view.rate_mbps, "" if mds is None else mds]], summary)
    rows = []
    for idx in sorted(catalog.mcs):
        p = catalog.mcs[idx]
        for bw, rate in sorted(p.rates.items()):
            rows.append([idx, bw, p.modulation, str(p.code_rate), p.repetition, rate, p.mds.get(bw, "")])
    return SweepResult(["mcs", "bw_mhz", "modulation", "code_rate", "repetition", "rate_mbps", "mds_dbm"], rows,
                       {"mcs_entries": len(catalog.mcs), "regions": len(catalog.regions)})


HANDLERS = {
    "fade-margin": _cmd_fade_margin,
    "range": _cmd_range,
    "rate": _cmd_rate,
    "relay-range": _cmd_relay_range,
    "relay-rate": _cmd_relay_rate,
    "ber-sim": _cmd_ber_sim,
    "catalog": _cmd_catalog,
}


def run(req: SweepRequest, catalog_path: Optional[str] = None, stdout=None) -> int:
    """Execute one request; returns the process exit status."""
    stdout = stdout or sys.stdout
    req.validate()
    catalog = load_catalog(catalog_path)
    result = HANDLERS[req.command](req, catalog)
    if req.output_path:
        text = render(result, req.format)
        try:
            with open(req.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            if req.gnuplot_stub:
                stub = Path(req.output_path).with_suffix(".gp")
                stub.write_text(gnuplot_stub(result, Path(req.output_path).name, req.command), encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot write output: {exc.strerror}", req.output_path) from None
    print(_summary_line(result.summary), file=stdout)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, scenario: bool = False) -> None:
    p.add_argument("--output", "-o", help="write the sweep rows to this file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--grid", type=Grid.parse, help="start:stop:step")
    p.add_argument("--gnuplot-stub", action="store_true", help="also write a .gp plot script next to --output")
    if scenario:
        p.add_argument("--scenario", "-s", required=True, help="scenario file")


def _add_link(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tx", default="ap-eu", help="transmitter preset: ap-eu, ap-us, rs, st")
    p.add_argument("--rx", default=None, help="receiver preset (default: st, or ap-eu when --tx st)")
    p.add_argument("--tx-power", type=float, help="override transmit power (dBm)")
    p.add_argument("--deploy", default="macro", choices=("macro", "pico"))
    p.add_argument("--fading", default="rayleigh", choices=("none", "rayleigh", "rician"))
    p.add_argument("--k-db", type=float, default=9.0, help="Rician K factor (dB)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahrelay", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--catalog", help=f"catalog data file (default: ${CATALOG_ENV} or bundled)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fade-margin", help="fade margin for an outage probability")
    p.add_argument("--model", default="rayleigh", choices=("rayleigh", "rician"))
    p.add_argument("--k-db", type=float, default=9.0)
    p.add_argument("--pout", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("range", help="received power vs distance and maximum range at MDS")
    _add_link(p)
    p.add_argument("--mcs", type=int, default=10)
    p.add_argument("--bw", type=float, default=1.0)
    p.add_argument("--mds", type=float, help="override sensitivity (dBm)")
    p.add_argument("--pout", type=float, default=0.0, help="outage probability; 0 = path loss only")
    _add_common(p)

    p = sub.add_parser("rate", help="budget-limited rate vs distance for one link")
    _add_link(p)
    p.add_argument("--pout", type=float, default=0.1)
    p.add_argument("--packet-bytes", type=int, default=4096)
    p.add_argument("--per", type=float, default=0.1)
    p.add_argument("--coding-gain", type=float, default=0.0)
    p.add_argument("--target", type=float, default=1e5, help="target rate (b/s)")
    p.add_argument("--clamp-mcs", type=int, help="cap the rate at this MCS's table rate")
    p.add_argument("--bw", type=float, default=1.0)
    _add_common(p)

    p = sub.add_parser("relay-range", help="dual-hop range at MDS with per-hop fade margins")
    p.add_argument("--mds", type=float)
    p.add_argument("--pout", type=float, help="override end-to-end outage")
    p.add_argument("--ap-rs-distance", type=float)
    _add_common(p, scenario=True)

    p = sub.add_parser("relay-rate", help="dual-hop DF rate vs RS-ST distance")
    p.add_argument("--target", type=float)
    p.add_argument("--packet-bytes", type=int)
    p.add_argument("--per", type=float)
    p.add_argument("--coding-gain", type=float)
    p.add_argument("--pout", type=float)
    p.add_argument("--ap-rs-distance", type=float)
    _add_common(p, scenario=True)

    p = sub.add_parser("ber-sim", help="Monte-Carlo BER vs RS-ST distance")
    p.add_argument("--mcs", type=int, choices=(0, 10))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--repetition-fading", choices=("shared", "independent"))
    p.add_argument("--pout", type=float)
    p.add_argument("--ap-rs-distance", type=float)
    _add_common(p, scenario=True)

    p = sub.add_parser("catalog", help="look up or list catalog entries")
    p.add_argument("--mcs", type=int)
    p.add_argument("--bw", type=float, default=1.0)
    p.add_argument("--region")
    _add_common(p)
    return parser


def _error_line(kind: str, exc: BaseException) -> str:
    fields = [f"error={kind}"]
    hop = getattr(exc, "hop", None)
    deficit = getattr(exc, "deficit_db", None)
    line = getattr(exc, "line", None)
    if hop is not None:
        fields.append(f"hop={hop}")
    if deficit is not None:
        fields.append(f"deficit_db={deficit:.2f}")
    if line is not None:
        fields.append(f"line={line}")
        if getattr(exc, "column", None) is not None:
            fields.append(f"column={exc.column}")
    fields.append("message=" + json.dumps(str(exc)))
    return " ".join(fields)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(_error_line("config", exc), file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    opts = {k: v for k, v in vars(args).items()
            if k not in ("command", "scenario", "output", "format", "grid", "gnuplot_stub", "catalog")}
    req = SweepRequest(
        command=args.command,
        scenario_path=getattr(args, "scenario", None),
        output_path=args.output,
        format=args.format,
        grid=args.grid,
        gnuplot_stub=args.gnuplot_stub,
        options=opts,
    )
    try:
        return run(req, args.catalog)
    except NoCoverageError as exc:
        print(_error_line("infeasible", exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(_error_line("numeric", exc), file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError, UnknownEntryError, NotDefinedError) as exc:
        print(_error_line("config", exc), file=sys.stderr)
        return EXIT_CONFIG
    except AhRelayError as exc:
        print(_error_line("error", exc), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
