"""Command-line front end.

Every report line is ``key: value``; floats carry 9 significant digits.
Stochastic commands default to a fixed seed so identical invocations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import detcap, detsim, gaussian, qmf
from .errors import ArgumentError, NetworkParseError, ResourceLimitError
from .netmodel import DEFAULT_NODE_CAP, DetNetwork, FunctionalNetwork, GaussNetwork, load_network

DEFAULT_SEED = 24301

EXIT_PARSE = 2
EXIT_RESOURCE = 3
EXIT_ARGUMENT = 4
EXIT_IO = 5

CSV_HELP = """CSV outputs (comma separated, '.' decimal point, header row first):
  sim --csv            trial,error_flag
  sim --records        trial,symbol,decoded,error   (qmf only)
  sim --json           one JSON object: scheme, T, R_in, trials, errors, error_rate, ci95, seed
  gauss --bound outage rate,p_lower,p_upper
  gauss --bound ergodic --csv
                       trial,cutset
  gap-surface          x_db,y_db,gap   (y outer loop, x inner loop)

Default seed for stochastic commands: %d.
Exit codes: 0 ok, 2 network parse error, 3 resource limit, 4 bad argument, 5 I/O error.
""" % DEFAULT_SEED


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def _emit(out, key, value):
    out.write(f"{key}: {value if isinstance(value, str) else fmt(value)}\n")


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI") from None
    if hi < lo:
        raise argparse.ArgumentTypeError("range must satisfy LO <= HI")
    return lo, hi


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def _load(path, kind):
    net = load_network(path)
    if not isinstance(net, kind):
        names = {DetNetwork: "deterministic", GaussNetwork: "Gaussian", FunctionalNetwork: "table-defined"}
        wanted = " or ".join(names[k] for k in (kind if isinstance(kind, tuple) else (kind,)))
        raise ArgumentError(f"this command needs a {wanted} network")
    return net


def _open_out(path):
    return open(path, "w", newline="") if path and path != "-" else None


# --------------------------------------------------------------------------
# subcommands


def cmd_det_capacity(args, out):
    net = _load(args.file, (DetNetwork, FunctionalNetwork))
    if isinstance(net, FunctionalNetwork):
        rate, _ = detcap.general_det_rate(net, grid=args.grid)
        _emit(out, "achievable rate (independent inputs)", rate)
        return
    if args.multicast:
        res = detcap.multicast_capacity(net, keep_table=args.per_cut, cap=args.node_cap)
    else:
        res = detcap.min_cut_capacity(net, keep_table=args.per_cut, cap=args.node_cap)
    _emit(out, "capacity", res.value)
    _emit(out, "min cut", res.argmin_cut.label(net.nodes))
    _emit(out, "destination", res.destination)
    if args.per_cut:
        for label, v in res.per_cut.items():
            _emit(out, f"cut {label}", v)


def cmd_unfold(args, out):
    net = _load(args.file, DetNetwork)
    if args.K < 1:
        raise ArgumentError("--K must be at least 1")
    cbar = detcap.min_cut_capacity(net, cap=args.node_cap).value
    value = detcap.unfolded_capacity(net, args.K, cbar)
    lower = (args.K - len(net.nodes)) * cbar
    upper = args.K * cbar
    _emit(out, "K", args.K)
    _emit(out, "cut-set value", cbar)
    _emit(out, "unfolded capacity", value)
    _emit(out, "unfolded capacity per stage", value / args.K)
    _emit(out, "sandwich lower", lower)
    _emit(out, "sandwich upper", upper)
    _emit(out, "sandwich holds", bool(lower <= value <= upper))


def _write_rows(path, header, rows):
    fh = _open_out(path)
    try:
        w = csv.writer(fh or sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh:
            fh.close()


def _write_text(path, text):
    fh = _open_out(path)
    try:
        (fh or sys.stdout).write(text)
    finally:
        if fh:
            fh.close()


def cmd_sim(args, out):
    if args.records and args.scheme != "qmf":
        raise ArgumentError("--records is only available for --scheme qmf")
    if args.scheme == "lff":
        net = _load(args.file, DetNetwork)
        res = detsim.estimate_error(net, args.T, args.R, args.trials, args.seed,
                                    keep_flags=True, acyclic_ok=args.acyclic)
        flags = res.flags
        summary = {"scheme": "lff", "T": args.T, "R_in": args.R, "trials": res.trials, "errors": res.errors,
                   "error_rate": res.p_hat, "ci95": [res.ci_low, res.ci_high], "bound": res.bound}
        line = (f"scheme=lff T={args.T} R={fmt(args.R)} trials={res.trials} errors={res.errors} "
                f"error_rate={fmt(res.p_hat)} ci95=[{fmt(res.ci_low)},{fmt(res.ci_high)}] "
                f"bound={fmt(res.bound)} seed={args.seed}")
    else:
        net = _load(args.file, GaussNetwork)
        res = qmf.simulate_qmf(net, args.T, args.R, args.trials, args.seed, acyclic_ok=args.acyclic,
                               keep_records=bool(args.records))
        flags = res.flags
        summary = res.summary()
        line = (f"scheme=qmf T={args.T} R={fmt(args.R)} trials={res.trials} errors={res.errors} "
                f"error_rate={fmt(res.error_rate)} ci95=[{fmt(res.ci_low)},{fmt(res.ci_high)}] "
                f"bound=n/a seed={args.seed}")
    if args.csv:
        _write_rows(args.csv, ["trial", "error_flag"], ((k, int(f)) for k, f in enumerate(flags)))
    if args.records:
        _write_rows(args.records, ["trial", "symbol", "decoded", "error"], res.records)
    if args.json:
        summary["seed"] = args.seed
        _write_text(args.json, json.dumps(summary, sort_keys=True) + "\n")
    out.write(line + "\n")


def _scalar_gains(net: GaussNetwork, edges):
    if not net.is_single_antenna():
        raise ArgumentError("this bound needs single-antenna nodes")
    return [complex(net.channels[e][0, 0]) if e in net.channels else 0j for e in edges]


def _relay_triplet(net: GaussNetwork):
    relays = [v for v in net.nodes if v not in (net.source, net.destination)]
    if len(relays) != 1:
        raise ArgumentError("--bound df needs exactly one relay")
    s, r, d = net.source, relays[0], net.destination
    return _scalar_gains(net, [(s, d), (s, r), (r, d)])


def _diamond_gains(net: GaussNetwork):
    relays = [v for v in net.nodes if v not in (net.source, net.destination)]
    s, d = net.source, net.destination
    if len(relays) != 2 or (s, d) in net.channels:
        raise ArgumentError("--bound pdf needs a two-relay diamond without a direct link")
    a1, a2 = relays
    return _scalar_gains(net, [(s, a1), (s, a2), (a1, d), (a2, d)])


def cmd_gauss(args, out):
    net = _load(args.file, GaussNetwork)
    b = args.bound
    if b == "cutset":
        res = gaussian.cutset_bounds(net, keep_table=args.per_cut, cap=args.node_cap)
        _emit(out, "cut-set upper (water-filled)", res.upper)
        _emit(out, "argmin cut (upper)", res.upper_cut.label(net.nodes))
        _emit(out, "cut-set iid", res.iid)
        _emit(out, "argmin cut (iid)", res.iid_cut.label(net.nodes))
        if args.per_cut:
            for label, (u, i) in res.per_cut.items():
                _emit(out, f"cut {label}", f"{fmt(u)} {fmt(i)}")
    elif b == "df":
        h_sd, h_sr, h_rd = _relay_triplet(net)
        upper = gaussian.relay_cutset(h_sd, h_sr, h_rd)
        rate = gaussian.df_rate_relay(h_sd, h_sr, h_rd)
        _emit(out, "cut-set", upper)
        _emit(out, "decode-forward rate", rate)
        _emit(out, "gap", upper - rate)
    elif b == "pdf":
        g = _diamond_gains(net)
        upper = gaussian.diamond_cutset(*g)
        rate = gaussian.pdf_rate_diamond(*g)
        _emit(out, "cut-set", upper)
        _emit(out, "partial decode-forward rate", rate)
        _emit(out, "decode-forward upper", gaussian.df_rate_diamond_upper(*g))
        _emit(out, "gap", upper - rate)
    elif b == "halfduplex":
        value, sched = gaussian.half_duplex_cutset(net)
        _emit(out, "half-duplex cut-set", value)
        _emit(out, "modes", len(sched.modes))
        for tx, t in zip(sched.modes, sched.t):
            label = "{" + ",".join(v for v in net.nodes if v in tx) + "}"
            _emit(out, f"time share tx={label}", float(t))
    elif b == "lowrate":
        res = gaussian.cutset_bounds(net, cap=args.node_cap)
        d = gaussian.support_degree(net)
        _emit(out, "degree", d)
        _emit(out, "orthogonal routing rate", gaussian.orthogonal_routing_bound(net))
        _emit(out, "cut-set upper", res.upper)
        _emit(out, "guarantee", res.upper / (2 * d * (d + 1)) if d else 0.0)
    elif b == "ergodic":
        res = gaussian.ergodic_cutset(net, gaussian.rayleigh_sampler(net), args.trials, args.seed)
        _emit(out, "ergodic cut-set mean", res.mean)
        _emit(out, "standard error", res.stderr)
        _emit(out, "ci95", f"[{fmt(res.ci_low)},{fmt(res.ci_high)}]")
        _emit(out, "seed", args.seed)
        if args.csv:
            fh = _open_out(args.csv)
            try:
                w = csv.writer(fh or sys.stdout, lineterminator="\n")
                w.writerow(["trial", "cutset"])
                for k, v in enumerate(res.samples):
                    w.writerow([k, fmt(v)])
            finally:
                if fh:
                    fh.close()
    elif b == "outage":
        if not args.rates:
            raise ArgumentError("--bound outage needs --rates")
        res = gaussian.outage_curve(net, gaussian.rayleigh_sampler(net), args.rates, args.margin,
                                    args.trials, args.seed)
        fh = _open_out(args.csv)
        try:
            w = csv.writer(fh or out, lineterminator="\n")
            w.writerow(["rate", "p_lower", "p_upper"])
            for r, lo, hi in zip(res.rates, res.lower, res.upper):
                w.writerow([fmt(r), fmt(lo), fmt(hi)])
        finally:
            if fh:
                fh.close()
        if fh:
            _emit(out, "margin", args.margin)
            _emit(out, "seed", args.seed)


def cmd_gap_surface(args, out):
    xs, ys, gap = gaussian.df_gap_surface(args.x_range, args.y_range, args.step, args.sd_db)
    gaussian.write_gap_csv(args.out, xs, ys, gap)
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    _emit(out, "points", int(gap.size))
    _emit(out, "max gap", float(gap[i, j]))
    _emit(out, "argmax x_db", float(xs[j]))
    _emit(out, "argmax y_db", float(ys[i]))
    _emit(out, "min gap", float(gap.min()))


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relaynet",
        description="Capacity bounds, relaying rates and coding simulations for relay networks.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, helptext):
        sp = sub.add_parser(name, help=helptext, description=helptext, epilog=CSV_HELP,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        return sp

    sp = add("det-capacity", "exact capacity of a linear deterministic network")
    sp.add_argument("file")
    sp.add_argument("--multicast", action="store_true", help="minimum over all destinations")
    sp.add_argument("--per-cut", action="store_true", help="print every cut value")
    sp.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    sp.add_argument("--grid", type=int, default=8, help="pmf grid for table-defined networks")
    sp.set_defaults(func=cmd_det_capacity)

    sp = add("unfold", "min-cut of the K-stage time-unfolded network")
    sp.add_argument("file")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    sp.set_defaults(func=cmd_unfold)

    sp = add("sim", "Monte Carlo decoding error of random relaying codes")
    sp.add_argument("file")
    sp.add_argument("--scheme", choices=["lff", "qmf"], required=True)
    sp.add_argument("--T", type=int, required=True, help="block length")
    sp.add_argument("--R", type=float, required=True, help="rate in bits per symbol")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--csv", help="per-trial CSV path ('-' for standard output)")
    sp.add_argument("--records", help="qmf per-trial symbol/decoded CSV path ('-' for standard output)")
    sp.add_argument("--json", help="summary JSON path ('-' for standard output)")
    sp.add_argument("--acyclic", action="store_true",
                    help="allow non-layered acyclic networks with zero-delay block relaying")
    sp.set_defaults(func=cmd_sim)

    sp = add("gauss", "Gaussian-network bounds and rates")
    sp.add_argument("file")
    sp.add_argument("--bound", required=True,
                    choices=["cutset", "df", "pdf", "halfduplex", "lowrate", "ergodic", "outage"])
    sp.add_argument("--per-cut", action="store_true")
    sp.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--rates", type=_floats, help="comma-separated target rates (outage)")
    sp.add_argument("--margin", type=float, default=0.0, help="gap added to rates for the upper outage curve")
    sp.add_argument("--csv", help="CSV path for ergodic samples or the outage curve")
    sp.set_defaults(func=cmd_gauss)

    sp = add("gap-surface", "cut-set minus decode-forward over a dB grid")
    sp.add_argument("--x-range", type=_range, default=(-20.0, 60.0),
                    help="relay-destination gain relative to the direct link, dB: LO,HI")
    sp.add_argument("--y-range", type=_range, default=(-20.0, 60.0),
                    help="source-relay gain relative to the direct link, dB: LO,HI")
    sp.add_argument("--step", type=float, default=1.0)
    sp.add_argument("--sd-db", type=float, default=20.0, help="direct-link SNR in dB")
    sp.add_argument("--out", required=True, help="CSV path ('-' for standard output)")
    sp.set_defaults(func=cmd_gap_surface)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if getattr(args, "out", None) == "-":
        args.out = out
    try:
        args.func(args, out)
    except NetworkParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ArgumentError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
