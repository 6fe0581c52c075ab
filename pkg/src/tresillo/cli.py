"""``tresillo`` command line.

Exit codes: 0 success, 2 parse/format error, 3 wrong meter or no onsets,
4 fit failure, 5 insufficient validation data, 6 nothing left to score.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, _kernels
from .errors import InsufficientData, TresilloError, ZeroVariance
from .fit import (MODEL_NAMES, FitConfig, ModelSpec, ValidationSet, fit_theta,
                  leave_one_out_s_star, model, objective, percentile_interval,
                  reference_vector, s_star)
from .onsets import build_onset_table, onset_histogram, quantize_onsets
from .pipeline import (exclusion_summary, load_manifest, persist_scores, read_rolling,
                       read_trend, rolling_trend, score_corpus, weekly_trend, write_rolling,
                       write_trend)
from .plot import PlotSpec, write_svg
from .rhythm import rhythm_vector, tresillo_template
from .similarity import load_theta, save_theta, unit_theta
from .smf import NoteOn, extract_time_signatures, read_smf
from .stats import BootstrapConfig, bootstrap_mean_ci, make_rng, welch_t_test
from .synthetic import write_validation_corpus

log = logging.getLogger("tresillo")

MIDI_SUFFIXES = {".mid", ".midi", ".smf"}


def default_seed() -> int:
    return int(os.environ.get("TRESILLO_SEED", "42"))


# -- helpers --------------------------------------------------------------------

def _midi_files(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"not a directory: {d}")
    return sorted(p for p in d.iterdir() if p.suffix.lower() in MIDI_SUFFIXES)


def _song_vector(path: Path):
    return rhythm_vector(build_onset_table(read_smf(path), str(path)))


def load_validation_set(tresillo_dir, non_tresillo_dir) -> ValidationSet:
    pos_files = _midi_files(tresillo_dir)
    neg_files = _midi_files(non_tresillo_dir)
    if len(pos_files) < 2 or len(neg_files) < 2:
        raise InsufficientData(
            f"need >= 2 MIDI files per directory, found {len(pos_files)} and {len(neg_files)}")
    return ValidationSet([(str(p), _song_vector(p)) for p in pos_files],
                         [(str(p), _song_vector(p)) for p in neg_files])


def fit_config_from_args(args) -> FitConfig:
    overrides = dict(max_iterations=args.max_iterations, tolerance=args.tolerance,
                     restarts=args.restarts, seed=args.seed)
    if args.config:
        return FitConfig.from_file(args.config, **overrides)
    return FitConfig(**{k: v for k, v in overrides.items() if v is not None})


# -- commands ---------------------------------------------------------------------

def cmd_inspect(args) -> int:
    smf = read_smf(args.midi)
    note_ons = [ev.tick for _, ev in smf.iter_events() if isinstance(ev.kind, NoteOn)]
    sigs = extract_time_signatures(smf)
    num, den = (sigs[0][1], sigs[0][2]) if sigs else (4, 4)
    per_bar = smf.ppq * 4 * num // den
    bars = max(note_ons) // per_bar + 1 if note_ons else 0
    print(f"file: {args.midi}")
    print(f"format: {smf.format}")
    print(f"ppq: {smf.ppq}")
    print(f"tracks: {len(smf.tracks)}")
    print(f"note-ons: {len(note_ons)}")
    print(f"bars: {bars}")
    if bars:
        print(f"note-ons per bar: {len(note_ons) / bars:g}")
    if sigs:
        for tick, n, d in sigs:
            print(f"time signature: {n}/{d} at tick {tick}")
    else:
        print("time signature: none (4/4 assumed)")
    return 0


def cmd_vector(args) -> int:
    table = build_onset_table(read_smf(args.midi), str(args.midi))
    if args.resolution == 16:
        values = [float(x) for x in rhythm_vector(table)]
    else:
        values = [int(x) for x in onset_histogram(quantize_onsets(table, args.resolution))]
    print(json.dumps(values))
    return 0


def cmd_fit(args) -> int:
    config = fit_config_from_args(args)
    vset = load_validation_set(args.tresillo_dir, args.non_tresillo_dir)
    ref = reference_vector(args.reference, vset)
    before_obj = objective(unit_theta(), ref, vset)
    before = s_star(ModelSpec(args.reference, False), vset, ref).s_star
    result = fit_theta(ref, vset, config)
    after = s_star(ModelSpec(args.reference, True, result.theta), vset, ref).s_star
    save_theta(args.out, result.theta)
    print(f"reference: {args.reference}")
    print(f"songs: {len(vset.tresillo)} tresillo, {len(vset.non_tresillo)} non-tresillo")
    print(f"objective before: {before_obj:.6f}")
    print(f"objective after: {result.objective:.6f}")
    print(f"S* before: {before:.6f}")
    print(f"S* after: {after:.6f}")
    for i, run in enumerate(result.trace):
        print(f"run {i}: objective {run.objective:.6f} after {run.iterations} iterations")
    print("theta: " + " ".join(f"{t:.4f}" for t in result.theta))
    print(f"wrote {args.out}")
    return 0


def evaluate_models(vset: ValidationSet, config: FitConfig, boot: BootstrapConfig,
                    theta=None, theta_reference="template") -> dict:
    """Goodness, bootstrap intervals, LOO intervals and pairwise Welch tests."""
    report = {"models": {}, "welch": {}}
    loo = {}
    for i, name in enumerate(MODEL_NAMES):
        spec = model(name, unit_theta())
        ref = reference_vector(spec.reference, vset)
        if spec.parameterized:
            if theta is not None and spec.reference == theta_reference:
                spec = spec.with_theta(theta)
            else:
                spec = spec.with_theta(fit_theta(ref, vset, config).theta)
        g = s_star(spec, vset, ref)
        n_pos = len(vset.tresillo)
        sims = [s for _, s in g.per_song]
        ci_pos = bootstrap_mean_ci(sims[:n_pos], boot, rng=make_rng([boot.seed, i, 0]))
        ci_neg = bootstrap_mean_ci(sims[n_pos:], boot, rng=make_rng([boot.seed, i, 1]))
        loo[name] = leave_one_out_s_star(spec, vset, config)
        lo, hi = percentile_interval(loo[name], 0.975)
        report["models"][name] = {
            "s_star": g.s_star,
            "mean_sim_tresillo": g.mean_sim_tresillo,
            "mean_sim_non_tresillo": g.mean_sim_non_tresillo,
            "gap": g.gap,
            "ci_tresillo": [ci_pos.lower, ci_pos.upper],
            "ci_non_tresillo": [ci_neg.lower, ci_neg.upper],
            "loo_s_star": loo[name],
            "loo_interval_97_5": [lo, hi],
            "theta": None if spec.theta is None else [float(t) for t in spec.theta],
        }
    for a, b in itertools.combinations(MODEL_NAMES, 2):
        try:
            res = welch_t_test(loo[a], loo[b])
            entry = {"t": res.t, "df": res.df, "p": res.p}
        except ZeroVariance:
            entry = {"t": None, "df": None, "p": None}
        report["welch"][f"{a} vs {b}"] = entry
    return report


def cmd_evaluate(args) -> int:
    config = fit_config_from_args(args)
    seed = config.seed
    vset = load_validation_set(args.tresillo_dir, args.non_tresillo_dir)
    theta = load_theta(args.theta) if args.theta else None
    boot = BootstrapConfig(draws=args.draws, confidence=0.95, seed=seed)
    report = evaluate_models(vset, config, boot, theta, args.reference)

    print(f"songs: {len(vset.tresillo)} tresillo, {len(vset.non_tresillo)} non-tresillo")
    print(f"{'model':<10} {'S*':>9} {'LOO 97.5% interval':>22} "
          f"{'mean tres [95% CI]':>28} {'mean non [95% CI]':>28}")
    for name, m in report["models"].items():
        lo, hi = m["loo_interval_97_5"]
        cp, cn = m["ci_tresillo"], m["ci_non_tresillo"]
        print(f"{name:<10} {m['s_star']:9.4f} {f'[{lo:.4f}, {hi:.4f}]':>22} "
              f"{m['mean_sim_tresillo']:8.4f} [{cp[0]:.4f}, {cp[1]:.4f}]   "
              f"{m['mean_sim_non_tresillo']:8.4f} [{cn[0]:.4f}, {cn[1]:.4f}]")
    print("Welch t-tests on LOO S*:")
    for pair, w in report["welch"].items():
        p = "n/a (zero variance)" if w["p"] is None else f"t={w['t']:.3f} df={w['df']:.1f} p={w['p']:.3g}"
        print(f"  {pair}: {p}")
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


def cmd_trend(args) -> int:
    entries = load_manifest(args.manifest)
    theta = load_theta(args.theta) if args.theta else unit_theta()
    scores = score_corpus(entries, theta, tresillo_template())
    persist_scores(scores, args.out_scores)
    summary = exclusion_summary(scores)
    n_scored = sum(1 for s in scores if s.excluded is None)
    print(f"entries: {len(scores)}, scored: {n_scored}")
    for reason, count in summary.items():
        print(f"excluded {reason}: {count}")
    boot = BootstrapConfig(draws=args.draws, confidence=0.95, seed=args.seed)
    weekly = weekly_trend(scores, args.measure, boot)
    write_trend(weekly, args.out_trend)
    rolling = rolling_trend(weekly, args.window)
    if args.out_rolling:
        write_rolling(rolling, args.out_rolling)
    print(f"weeks: {len(weekly)}")
    print(f"wrote {args.out_scores}, {args.out_trend}" +
          (f", {args.out_rolling}" if args.out_rolling else ""))
    return 0


def cmd_plot(args) -> int:
    points = read_trend(args.trend)
    overlay = read_rolling(args.rolling) if args.rolling else None
    spec = PlotSpec(series=points, band=not args.no_band, title=args.title,
                    width_px=args.width, height_px=args.height, overlay=overlay)
    write_svg(spec, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_synth(args) -> int:
    pos, neg = write_validation_corpus(args.out, seed=args.seed, n_per_class=args.songs)
    print(f"wrote {pos} and {neg}")
    return 0


# -- parser -----------------------------------------------------------------------

def _add_fit_flags(p):
    p.add_argument("--config", help="JSON file with FitConfig fields")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="PRNG seed (default: $TRESILLO_SEED or 42)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tresillo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarise a MIDI file")
    p.add_argument("midi")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("vector", help="print a song's rhythm vector as JSON")
    p.add_argument("midi")
    p.add_argument("--resolution", type=int, choices=(16, 128), default=16)
    p.set_defaults(func=cmd_vector)

    for name, func, help_ in (("fit", cmd_fit, "learn slot weights from labelled songs"),
                              ("evaluate", cmd_evaluate, "compare the four models")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--tresillo-dir", required=True)
        p.add_argument("--non-tresillo-dir", required=True)
        p.add_argument("--reference", choices=("template", "centroid"), default="template")
        _add_fit_flags(p)
        p.set_defaults(func=func)
        if name == "fit":
            p.add_argument("--out", required=True, help="theta file (.theta.json)")
        else:
            p.add_argument("--theta", help="weights for the model matching --reference")
            p.add_argument("--draws", type=int, default=1000)
            p.add_argument("--json-out")

    p = sub.add_parser("trend", help="score a chart manifest and build weekly trends")
    p.add_argument("--manifest", required=True)
    p.add_argument("--theta", help="weights for C* (default: all ones)")
    p.add_argument("--window", type=int, default=52)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--measure", choices=("C", "Cstar"), default="C")
    p.add_argument("--out-scores", required=True)
    p.add_argument("--out-trend", required=True)
    p.add_argument("--out-rolling")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("plot", help="render a trend CSV as SVG")
    p.add_argument("--trend", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rolling", help="rolling-mean CSV drawn as an extra line")
    p.add_argument("--title", default="Weekly Tresillo similarity")
    p.add_argument("--width", type=int, default=1000)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--no-band", action="store_true")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("synth", help="write a synthetic labelled validation corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--songs", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", "absent") is None:
        args.seed = default_seed()
    log.debug("kernel backend: %s", _kernels.BACKEND)
    try:
        return args.func(args)
    except TresilloError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"FileNotFound: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
