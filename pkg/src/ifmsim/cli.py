"""Command-line front end.

Each subcommand writes one table, as CSV (header row, 17 significant
digits) or as a JSON array of row objects::

    ifmsim sweep --eta 0,0.05,0.1,0.2 --n 2..500 --figure fig8.png
    ifmsim bell-measure --trials 100000 --seed 7 -o bell.csv
    ifmsim required-n --target-p 0.9,0.99 --eta 0,0.05,0.1

Exit status: 0 on success, 2 on a usage error, 1 on a runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, is_dataclass

from . import circuits, interferometer, trials
from .ifm_gate import GateMode, IfmGateConfig, truth_table
from .state_core import Species, fidelity

COLUMNS = {
    "sweep": ["N", "eta", "p_exact", "p_approx"],
    "bell": ["mode", "N", "eta", "fidelity", "absorbed_mass"],
    "ghz": ["mode", "N", "eta", "fidelity", "absorbed_mass"],
    "chi": ["mode", "N", "eta", "fidelity", "absorbed_mass"],
    "photon-bell": ["trial", "label", "fidelity"],
    "bell-measure": ["trial", "true_label", "reported_label", "guessed", "correct"],
    "cnot": ["trial", "b1", "b2", "success"],
    "required-n": ["target_p", "eta", "n_estimate", "n_exact_search"],
    "truth-table": ["x", "y", "a", "b", "x_out", "y_out", "a_out", "b_out", "probability"],
}


# --------------------------------------------------------------------------
# argument parsing


def _items(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if not all(parts):
        raise argparse.ArgumentTypeError(f"empty item in {text!r}")
    return parts


def parse_int_values(text: str) -> list[int]:
    """``"2..500"``, ``"10..100..10"``, ``"5"`` or comma lists of those."""
    out = []
    try:
        for part in _items(text):
            bits = part.split("..")
            if len(bits) == 1:
                out.append(int(bits[0]))
            elif len(bits) in (2, 3):
                start, end = int(bits[0]), int(bits[1])
                step = int(bits[2]) if len(bits) == 3 else 1
                if step <= 0 or end < start:
                    raise ValueError
                out.extend(range(start, end + 1, step))
            else:
                raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer range {text!r}") from None
    if any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("N values must be positive")
    return out


def parse_float_values(text: str) -> list[float]:
    """Comma list of floats; ``start..end..step`` also accepted."""
    out = []
    try:
        for part in _items(text):
            bits = part.split("..")
            if len(bits) == 1:
                out.append(float(bits[0]))
            elif len(bits) == 3:
                start, end, step = map(float, bits)
                if step <= 0 or end < start:
                    raise ValueError
                k = 0
                while start + k * step <= end + 1e-12:
                    out.append(round(start + k * step, 12))
                    k += 1
            else:
                raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid value list {text!r}") from None
    return out


def parse_eta(text: str) -> list[float]:
    values = parse_float_values(text)
    if any(not 0.0 <= v < 1.0 for v in values):
        raise argparse.ArgumentTypeError("eta values must lie in [0, 1)")
    return values


def parse_probability(text: str) -> list[float]:
    values = parse_float_values(text)
    if any(not 0.0 < v < 1.0 for v in values):
        raise argparse.ArgumentTypeError("target probabilities must lie in (0, 1)")
    return values


def parse_seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= seed <= trials.MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit value")
    return seed


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ifmsim", description="Interaction-free-measurement gate simulator.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("csv", "json"), default="csv")
    output.add_argument("-o", "--output", default="-", help="output file (default: stdout)")

    gate = argparse.ArgumentParser(add_help=False)
    gate.add_argument("--mode", choices=[m.value for m in GateMode],
                      help="gate model; defaults to finite when --n is given, else ideal")
    gate.add_argument("--n", "--n-splitters", dest="n", type=parse_int_values,
                      help="beam splitters per gate (finite mode)")
    gate.add_argument("--eta", type=parse_eta, default=[0.0], help="absorber transparency (finite mode)")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--trials", type=positive_int, default=1000)
    mc.add_argument("--seed", type=parse_seed, default=0)
    mc.add_argument("--jobs", type=positive_int, default=1, help="worker processes")

    p = sub.add_parser("sweep", parents=[output], help="exact and approximate P over an (N, eta) grid")
    p.add_argument("--n", type=parse_int_values, default=parse_int_values("2..500"))
    p.add_argument("--eta", type=parse_eta, default=[0.0, 0.05, 0.1, 0.2])
    p.add_argument("--figure", help="also render the curves to this image file")

    for name, text in (("bell", "Bell pair from a positron and an electron"),
                       ("ghz", "three-particle GHZ state"),
                       ("chi", "four-qubit resource state for the teleported CNOT")):
        p = sub.add_parser(name, parents=[output, gate], help=f"fidelity of the {text}")
        if name == "bell":
            p.add_argument("--label", choices=[lab.value for lab in circuits.BellLabel], default="PhiPlus")

    sub.add_parser("photon-bell", parents=[output, gate, mc], help="Bell pairs of photons heralded by an atom")
    p = sub.add_parser("bell-measure", parents=[output, gate, mc], help="IFM Bell measurement on random Bell inputs")
    p.add_argument("--figure", help="also render the confusion matrix to this image file")
    sub.add_parser("cnot", parents=[output, gate, mc], help="teleported CNOT on random inputs")

    p = sub.add_parser("required-n", parents=[output], help="splitters needed for a target P")
    p.add_argument("--target-p", type=parse_probability, default=[0.9])
    p.add_argument("--eta", type=parse_eta, default=[0.0, 0.05, 0.1])
    p.add_argument("--n-max", type=positive_int, default=10**6, help="upper limit of the exact scan")

    sub.add_parser("truth-table", parents=[output, gate], help="gate action on the four basis inputs")
    return parser


def _gate_configs(args, parser, single: bool) -> list[IfmGateConfig]:
    mode = args.mode or ("finite" if args.n else "ideal")
    if mode == "ideal":
        if args.n:
            parser.error("--n only applies in finite mode")
        return [IfmGateConfig.ideal()]
    if not args.n:
        parser.error("finite mode needs --n")
    configs = [IfmGateConfig.finite(n, eta) for n in args.n for eta in args.eta]
    if single and len(configs) != 1:
        parser.error(f"{args.command} takes a single --n and --eta value")
    return configs


# --------------------------------------------------------------------------
# commands


def _state_rows(args, parser, build, reference):
    rows = []
    for cfg in _gate_configs(args, parser, single=False):
        state = build(cfg)
        rows.append({
            "mode": cfg.mode.value,
            "N": cfg.n_splitters,
            "eta": cfg.eta if cfg.mode is GateMode.FINITE else None,
            "fidelity": fidelity(state, reference),
            "absorbed_mass": state.absorbed_mass(),
        })
    return rows


def _truth_rows(args, parser):
    (cfg,) = _gate_configs(args, parser, single=True)
    rows = []
    for row in truth_table(cfg, control_rail=1, species=(Species.POSITRON, Species.ELECTRON)):
        for occ, prob in row.rails_out():
            rows.append(dict(zip(COLUMNS["truth-table"], row.rails_in + occ + (prob,))))
    return rows


def run(args, parser) -> list[dict]:
    cmd = args.command
    if cmd == "sweep":
        if any(n < 2 for n in args.n):
            parser.error("sweep needs N >= 2")
        rows = interferometer.sweep(args.n, args.eta)
        if args.figure:
            from .plotting import plot_sweep
            plot_sweep(rows, args.figure)
    elif cmd == "bell":
        label = circuits.BellLabel(args.label)
        rows = _state_rows(args, parser, lambda c: circuits.bell_generation(c, label), circuits.bell_state(label))
    elif cmd == "ghz":
        rows = _state_rows(args, parser, circuits.ghz_generation, circuits.ghz_state())
    elif cmd == "chi":
        rows = _state_rows(args, parser, circuits.chi_preparation, circuits.chi_state())
    elif cmd in ("photon-bell", "bell-measure", "cnot"):
        (cfg,) = _gate_configs(args, parser, single=True)
        fn = {"photon-bell": trials.photon_bell_trial,
              "bell-measure": trials.bell_measure_trial,
              "cnot": trials.cnot_trial}[cmd]
        rows = trials.run_trials(fn, args.trials, args.seed, cfg, args.jobs)
        if cmd == "bell-measure" and args.figure:
            from .plotting import plot_bell_confusion
            plot_bell_confusion(rows, args.figure)
    elif cmd == "required-n":
        rows = [
            {
                "target_p": p,
                "eta": eta,
                "n_estimate": interferometer.required_splitters(p, eta),
                "n_exact_search": interferometer.exact_threshold_scan(p, eta, args.n_max),
            }
            for p in args.target_p
            for eta in args.eta
        ]
    elif cmd == "truth-table":
        rows = _truth_rows(args, parser)
    else:  # pragma: no cover - argparse rejects unknown commands
        parser.error(f"unknown command {cmd}")
    return [asdict(r) if is_dataclass(r) else r for r in rows]


# --------------------------------------------------------------------------
# output


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = run(args, parser)
    except (ValueError, OSError) as exc:
        print(f"ifmsim: error: {exc}", file=sys.stderr)
        return 1
    text = render(rows, COLUMNS[args.command], args.format)
    if args.output == "-":
        sys.stdout.write(text)
        return 0
    try:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"ifmsim: error: cannot write {args.output}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
