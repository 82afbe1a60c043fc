"""Command-line front end.

Subcommands: profile, encode, decode, fer, ccdf, sweep, r0, trace, bounds,
drift.  Global flags --config (JSON with ExperimentConfig field names),
--seed, --out-dir and --threads apply to the simulation commands.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from .channel import SnrSpec, snr_to_sigma2, trial_rng
from .construction import cached_table
from .encoder import CONV_3211, pac_encode
from .fano import FanoConfig, decode
from .harness import (ExperimentConfig, run_ccdf, run_drift, run_fer,
                      run_r_over_r0, run_sweep, run_trace, write_ccdf_csv,
                      write_drift_csv, write_fer_csv, write_sweep_csv,
                      write_trace_csv)
from .metric import BIAS_RULES, build_bias
from .rate_profile import CodeSpec, partial_rates, rm_profile


def _config_from_args(args) -> ExperimentConfig:
    fields = {}
    if args.config:
        with open(args.config) as f:
            fields.update(json.load(f))
    overrides = {
        "n_code": args.N, "k_info": args.K, "rule": args.bias_rule,
        "alpha": args.alpha, "b_info": args.b_info, "b_frozen": args.b_frozen,
        "delta": args.delta, "mnv": args.mnv, "trials": args.trials,
        "target_errors": args.target_errors, "master_seed": args.seed,
        "threads": args.threads, "convention": args.snr_convention,
    }
    for key, val in overrides.items():
        if val is not None:
            fields[key] = val
    if args.snr_db is not None:
        fields["snr_db_list"] = tuple(args.snr_db)
    if "snr_db_list" in fields:
        fields["snr_db_list"] = tuple(fields["snr_db_list"])
    if fields.get("convention") == "ebn0":
        fields["convention"] = "EbN0"
    if fields.get("convention") == "esn0":
        fields["convention"] = "EsN0"
    valid = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(fields) - valid
    if unknown:
        raise SystemExit(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(**fields)


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--snr-db", type=float, nargs="+", default=None)
    p.add_argument("--snr-convention", choices=["ebn0", "esn0"], default=None)
    p.add_argument("--bias-rule", choices=list(BIAS_RULES), default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--b-info", type=float, default=None)
    p.add_argument("--b-frozen", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--mnv", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--target-errors", type=int, default=None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="paclab",
                                     description="PAC-code sequential-decoding laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="print the RM information set")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--design-snr", type=float, default=None,
                   help="break score ties by bit-channel mean at this Eb/N0 (dB)")

    p = sub.add_parser("encode", help="encode hex/binary data from stdin")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--format", choices=["bin", "hex"], default="bin")

    p = sub.add_parser("decode", help="single-shot decode of one random frame")
    _add_common(p)
    p.add_argument("--trace", action="store_true")

    for name in ("fer", "ccdf", "r0"):
        p = sub.add_parser(name)
        _add_common(p)

    p = sub.add_parser("sweep")
    _add_common(p)
    p.add_argument("--variable", choices=["alpha", "delta"], required=True)
    p.add_argument("--grid", type=float, nargs="+", required=True)

    p = sub.add_parser("trace")
    _add_common(p)
    p.add_argument("--samples", type=int, default=10)

    p = sub.add_parser("bounds")
    _add_common(p)
    p.add_argument("--r", type=float, default=0.5)

    p = sub.add_parser("drift")
    _add_common(p)

    args = parser.parse_args(argv)

    if args.command == "profile":
        means = None
        if args.design_snr is not None:
            means = cached_table(args.N, args.design_snr, args.K / args.N).mean
        info = rm_profile(args.N, args.K, means)
        print(",".join(str(i) for i in info))
        return 0

    if args.command == "encode":
        text = sys.stdin.read().strip()
        if args.format == "hex":
            bits = np.array([int(b) for b in bin(int(text, 16))[2:].zfill(args.K)],
                            dtype=np.uint8)[-args.K:]
        else:
            bits = np.array([int(c) for c in text if c in "01"], dtype=np.uint8)
        spec = CodeSpec(args.N, args.K, rm_profile(args.N, args.K), CONV_3211)
        _, _, x = pac_encode(bits, spec)
        print("".join(str(b) for b in x))
        return 0

    cfg = _config_from_args(args)

    if args.command == "decode":
        snr_db = cfg.snr_db_list[0]
        spec = cfg.code_spec()
        table = cached_table(cfg.n_code, snr_db, spec.rate, cfg.convention)
        schedule = build_bias(cfg.rule, table, spec, alpha=cfg.alpha,
                              b_info=cfg.b_info, b_frozen=cfg.b_frozen)
        sigma2 = snr_to_sigma2(SnrSpec(snr_db, spec.rate, cfg.convention))
        data = trial_rng(cfg.master_seed, 0, 0).integers(0, 2, cfg.k_info).astype(np.uint8)
        v, _, x = pac_encode(data, spec)
        noise = trial_rng(cfg.master_seed, 0, 1).normal(0, np.sqrt(sigma2), cfg.n_code)
        llrs = 2.0 * ((1.0 - 2.0 * x) + noise) / sigma2
        rec = decode(llrs, spec, FanoConfig(delta=cfg.delta, bias=schedule,
                                            mnv=cfg.mnv, trace=args.trace))
        rec.success = bool(np.array_equal(rec.v_hat, v))
        print(json.dumps({"success": rec.success, "visits_total": rec.visits_total,
                          "anv": rec.anv, "hit_mnv": rec.hit_mnv}))
        if args.trace:
            for d, g in enumerate(rec.trace):
                print(f"{d},{g:.6f}")
        return 0

    if args.command == "fer":
        stats = run_fer(cfg)
        path = _out(args, "fer.csv")
        write_fer_csv(stats, path)
        print(path)
        return 0

    if args.command == "ccdf":
        _, rows = run_ccdf(cfg)
        path = _out(args, "ccdf.csv")
        write_ccdf_csv(rows, path)
        print(path)
        return 0

    if args.command == "sweep":
        rows = run_sweep(cfg, args.variable, args.grid)
        path = _out(args, "sweep.csv")
        write_sweep_csv(rows, path)
        print(path)
        return 0

    if args.command == "r0":
        rows = run_r_over_r0(cfg)
        path = _out(args, "r0.csv")
        with open(path, "w") as f:
            f.write("snr_db,r_over_r0,anv_correct\n")
            for snr_db, ratio, anv, _ in rows:
                f.write(f"{snr_db:.10g},{ratio:.10g},{anv:.10g}\n")
        print(path)
        return 0

    if args.command == "trace":
        traces = run_trace(cfg, args.samples)
        path = _out(args, "trace.csv")
        write_trace_csv(traces, path)
        print(path)
        return 0

    if args.command == "bounds":
        spec = cfg.code_spec()
        snr_db = cfg.snr_db_list[0]
        table = cached_table(cfg.n_code, snr_db, spec.rate, cfg.convention)
        schedule = build_bias(cfg.rule, table, spec, alpha=cfg.alpha,
                              b_info=cfg.b_info, b_frozen=cfg.b_frozen)
        rates = partial_rates(spec.info_set, spec.n_code)
        print(json.dumps(bounds_mod.bounds_summary(args.r, schedule, table, rates)))
        return 0

    if args.command == "drift":
        drift = run_drift(cfg, cfg.trials)
        path = _out(args, "drift.csv")
        write_drift_csv(drift, path)
        print(path)
        return 0

    parser.error(f"unhandled command {args.command}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
