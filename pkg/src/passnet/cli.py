"""Passing-network HMMs: train, simulate, compare and report from the command line.

Exit codes: 0 success, 1 input or usage error, 2 training stopped at the
iteration cap without converging (outputs still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import ingest, svg
from .evaluation import align_states, compare_transition, figure_data, permute_params, player_report
from .hmm import ZeroProbabilityError
from .model import Alphabet
from .network import PassCountMatrix, build_network, empirical_transition, to_dot, to_edge_csv, to_graphml
from .synth import generate_dataset, transition_counts
from .training import TrainConfig, TrainingError, train

log = logging.getLogger("passnet")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _in_file(path: str, fn, *args):
    try:
        return fn(_read(path), *args)
    except (ingest.IngestError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# --- commands ------------------------------------------------------------


def cmd_train(args) -> int:
    roster = _in_file(args.roster, ingest.parse_roster)
    alphabet = _in_file(args.alphabet, ingest.parse_alphabet) if args.alphabet else Alphabet()
    games = _in_file(args.games, ingest.parse_games, alphabet)
    if not games:
        raise UsageError(f"{args.games}: no sequences")
    config = TrainConfig(max_iterations=args.iters, loglik_tolerance=args.tol,
                         restarts=args.restarts, seed=args.seed,
                         smoothing_epsilon=args.epsilon)
    try:
        report = train(games, len(roster), len(alphabet), config)
    except (TrainingError, ZeroProbabilityError) as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, ingest.write_params(report.final_params, roster, alphabet))
    payload = {"params": str(args.output), "num_games": len(games), **report.to_dict()}
    if args.report:
        _write(args.report, json.dumps(payload, indent=2) + "\n")
    _emit(payload)
    if not report.converged:
        log.warning("no convergence after %d iterations", report.iterations_used)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


NETWORK_FORMATS = {"dot": to_dot, "graphml": to_graphml, "csv": to_edge_csv}


def cmd_network(args) -> int:
    roster = _in_file(args.roster, ingest.parse_roster)
    counts = _in_file(args.passes, ingest.parse_pass_counts, roster)
    net = build_network(counts)
    _write(args.output, NETWORK_FORMATS[args.format](net))
    return EXIT_OK


def cmd_report(args) -> int:
    params, roster, alphabet = _in_file(args.params, ingest.read_params)
    if args.player not in roster.ids:
        raise UsageError(f"unknown player {args.player!r}")
    net = None
    if args.passes:
        net = build_network(_in_file(args.passes, ingest.parse_pass_counts, roster))
    report = player_report(params, roster, args.player, net, alphabet.symbols)
    if args.figures:
        out = Path(args.figures)
        pie = figure_data(params, "pie", args.player, roster=roster, symbols=alphabet.symbols)
        bar = figure_data(params, "bar", roster=roster, symbols=alphabet.symbols)
        _write(out / f"pie_{args.player}.csv", pie.to_csv())
        _write(out / f"pie_{args.player}.svg", svg.pie_svg(pie))
        _write(out / "bar_organizer.csv", bar.to_csv())
        _write(out / "bar_organizer.svg", svg.bar_svg(bar))
    _emit(report.to_dict())
    return EXIT_OK


def cmd_compare(args) -> int:
    params, roster, _ = _in_file(args.trained, ingest.read_params)
    if args.reference:
        ref, ref_roster, _ = _in_file(args.reference, ingest.read_params)
        if (ref.m, ref.n) != (params.m, params.n):
            raise UsageError("reference and trained params differ in shape")
        alignment = align_states(ref, params)
        params = permute_params(params, alignment.permutation)
    try:
        counts: PassCountMatrix = ingest.parse_pass_counts(_read(args.empirical), roster)
    except ingest.IngestError as exc:
        raise UsageError(f"{args.empirical}: {exc}") from None
    emp = empirical_transition(counts)
    cmp = compare_transition(emp, params.A)
    payload = {"states": list(roster.ids), **cmp.summary()}
    if args.reference:
        payload["alignment"] = list(alignment.permutation)
    if args.heatmap:
        out = Path(args.heatmap)
        ids = list(roster.ids)
        emp_grid, tr_grid = cmp.heatmap_pair
        _write(out / "heatmap_empirical.svg", svg.heatmap_svg(emp_grid, ids, title="empirical"))
        _write(out / "heatmap_trained.svg", svg.heatmap_svg(tr_grid, ids, title="trained"))
        _write(out / "heatmap.csv",
               figure_data(params, "heatmap", emp, roster=roster).to_csv())
    _emit(payload)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params, roster, alphabet = _in_file(args.params, ingest.read_params)
    if args.games < 0:
        raise UsageError("--games must be >= 0")
    if args.len_min < 1 or args.len_max < args.len_min:
        raise UsageError(f"invalid length range [{args.len_min}, {args.len_max}]")
    games, paths = generate_dataset(params, args.games, (args.len_min, args.len_max),
                                    args.seed, return_paths=True)
    _write(args.output, ingest.write_games(games))
    if args.passes_out:
        counts = PassCountMatrix(roster, transition_counts(paths, params.m))
        _write(args.passes_out, ingest.write_pass_counts(counts))
    return EXIT_OK


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="passnet", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="estimate HMM parameters from game sequences")
    p.add_argument("--games", required=True, help="JSON-lines games file")
    p.add_argument("--roster", required=True, help="roster JSON")
    p.add_argument("--alphabet", help="alphabet JSON (default 0,1,2,3 points)")
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.0, help="additive smoothing")
    p.add_argument("--report", help="also write the training report JSON here")
    p.add_argument("-o", "--output", required=True, help="params JSON to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("network", help="build a passing network from a pass-count matrix")
    p.add_argument("--passes", required=True)
    p.add_argument("--roster", required=True)
    p.add_argument("--format", required=True, choices=sorted(NETWORK_FORMATS))
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("report", help="player value profile")
    p.add_argument("--params", required=True)
    p.add_argument("--passes")
    p.add_argument("--player", required=True)
    p.add_argument("--figures", help="directory for pie/bar SVG and CSV")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("compare", help="compare trained and empirical transition matrices")
    p.add_argument("--empirical", required=True, help="pass-count CSV")
    p.add_argument("--trained", required=True, help="trained params JSON")
    p.add_argument("--reference", help="params JSON to align trained states against first")
    p.add_argument("--heatmap", help="directory for paired heatmap SVGs")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="sample games from parameters")
    p.add_argument("--params", required=True)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--len-min", type=int, required=True)
    p.add_argument("--len-max", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--passes-out", help="also write hidden-path transition counts as CSV")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
