"""Command line entry point: ``run``, ``stats`` and ``eval``.

Config files are JSON objects.  Every key is optional except ``problem``::

    {
      "problem": "deceptive3",
      "engine": ["ga"],                     # "ga", "haea" or a list
      "replacement": ["generational", "steady_state"],
      "regen": [false, true],
      "crossover_rates": [0.6, 0.7, 0.8, 0.9, 1.0],
      "runs": 30, "iterations": 1000, "pop_size": 100, "tournament_k": 4,
      "mutation": null,                     # per_bit (GA default) | single_bit (HAEA default)
      "marking": {"mark_rate": 0.02, "p_add": 0.35, "p_remove": 0.35, "p_modify": 0.30},
      "periods": [[200, 350], [500, 650], [800, 950]],
      "seed": 0,
      "output_dir": "results"
    }
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import stats
from .engines import DEFAULT_PERIODS, ENGINES, MUTATIONS, REPLACEMENTS, ConfigError, EngineConfig, MarkingPeriod, run
from .epigenome import MarkingParams
from .genome import as_bits
from .problems import PROBLEMS, eval_problem, get_problem

log = logging.getLogger("regen_ea")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

_KEYS = {"problem", "engine", "replacement", "regen", "crossover_rates", "runs", "iterations",
         "pop_size", "tournament_k", "mutation", "marking", "periods", "seed", "output_dir"}


@dataclass(frozen=True)
class Cell:
    label: str
    config: EngineConfig


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    engines: tuple = ("ga",)
    replacements: tuple = REPLACEMENTS
    regen: tuple = (False, True)
    crossover_rates: tuple = (0.6, 0.7, 0.8, 0.9, 1.0)
    runs: int = 30
    iterations: int = 1000
    pop_size: int = 100
    tournament_k: int = 4
    mutation: Optional[str] = None
    marking: MarkingParams = field(default_factory=MarkingParams)
    periods: tuple = DEFAULT_PERIODS
    seed: int = 0
    output_dir: str = "results"

    def cells(self) -> list[Cell]:
        """Grid cells in a fixed order: engine, replacement, regen, crossover rate.

        HAEA picks its operators adaptively, so it gets one cell per
        (replacement, regen) and ignores ``crossover_rates``.
        """
        out = []
        for engine in self.engines:
            for replacement in self.replacements:
                for regen in self.regen:
                    rates = self.crossover_rates if engine == "ga" else (1.0,)
                    for rate in rates:
                        label = cell_label(engine, replacement, regen, rate)
                        config = EngineConfig(
                            engine=engine, replacement=replacement, regen_enabled=regen,
                            pop_size=self.pop_size, iterations=self.iterations, crossover_rate=rate,
                            mutation=self.mutation, tournament_k=self.tournament_k,
                            marking=self.marking, periods=self.periods,
                            seed=cell_seed(self.seed, label),
                        )
                        out.append(Cell(label, config))
        return out


def cell_label(engine: str, replacement: str, regen: bool, rate: float) -> str:
    """Labels in the usual table style: ``GGAX06``, ``ReGenSSGAX10``, ``ReGenGHAEA``."""
    prefix = ("ReGen" if regen else "") + ("G" if replacement == "generational" else "SS")
    if engine == "haea":
        return prefix + "HAEA"
    tenths = rate * 10
    suffix = f"{round(tenths):02d}" if abs(tenths - round(tenths)) < 1e-9 else repr(rate).replace(".", "")
    return f"{prefix}GAX{suffix}"


def cell_seed(base_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{base_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1  # leave headroom for + run index


# --------------------------------------------------------------------------
# config parsing


def _line_of(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


def _fail(path, text, key, message) -> ConfigError:
    line = _line_of(text, key) if key else None
    where = f"{path}:{line}" if line else str(path)
    return ConfigError(f"{where}: {message}")


def _as_tuple(value, kind, key, path, text):
    values = value if isinstance(value, list) else [value]
    if not values or not all(isinstance(v, kind) and not (kind is not bool and isinstance(v, bool)) for v in values):
        raise _fail(path, text, key, f"{key!r} must be a {kind.__name__} or a non-empty list of them")
    return tuple(values)


def _int(raw, key, default, path, text, minimum=1):
    value = raw.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise _fail(path, text, key, f"{key!r} must be an integer >= {minimum}, got {value!r}")
    return value


def _periods(value, path, text) -> tuple:
    if not isinstance(value, list):
        raise _fail(path, text, "periods", "'periods' must be a list of [start, end] pairs")
    out = []
    for p in value:
        if isinstance(p, dict) and set(p) == {"start", "duration"}:
            out.append(MarkingPeriod.from_duration(p["start"], p["duration"]))
        elif isinstance(p, list) and len(p) == 2 and all(isinstance(v, int) for v in p):
            out.append(MarkingPeriod(*p))
        else:
            raise _fail(path, text, "periods", f"bad marking period {p!r}; use [start, end] or "
                                               "{\"start\": s, \"duration\": d}")
    return tuple(out)


def parse_config(path) -> ExperimentSpec:
    """Read and validate a JSON experiment config; missing keys take the defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")
    for key in raw:
        if key not in _KEYS:
            raise _fail(path, text, key, f"unknown key {key!r}")
    if "problem" not in raw:
        raise ConfigError(f"{path}: missing required key 'problem'")
    problem = raw["problem"]
    if problem not in PROBLEMS:
        raise _fail(path, text, "problem", f"unknown problem {problem!r}; choose from {', '.join(PROBLEMS)}")

    defaults = ExperimentSpec(problem)
    engines = _as_tuple(raw.get("engine", list(defaults.engines)), str, "engine", path, text)
    for e in engines:
        if e not in ENGINES:
            raise _fail(path, text, "engine", f"unknown engine {e!r}; choose from {', '.join(ENGINES)}")
    replacements = _as_tuple(raw.get("replacement", list(defaults.replacements)), str, "replacement", path, text)
    for r in replacements:
        if r not in REPLACEMENTS:
            raise _fail(path, text, "replacement", f"unknown replacement {r!r}; choose from {', '.join(REPLACEMENTS)}")
    regen = _as_tuple(raw.get("regen", list(defaults.regen)), bool, "regen", path, text)
    rates = raw.get("crossover_rates", list(defaults.crossover_rates))
    if not isinstance(rates, list) or not rates or not all(
            isinstance(r, (int, float)) and not isinstance(r, bool) and 0 <= r <= 1 for r in rates):
        raise _fail(path, text, "crossover_rates", "'crossover_rates' must be a non-empty list of probabilities")
    mutation = raw.get("mutation")
    if mutation is not None and mutation not in MUTATIONS:
        raise _fail(path, text, "mutation", f"unknown mutation {mutation!r}; choose from {', '.join(MUTATIONS)}")

    marking = raw.get("marking", {})
    if isinstance(marking, (int, float)) and not isinstance(marking, bool):
        marking = {"mark_rate": marking}
    if not isinstance(marking, dict):
        raise _fail(path, text, "marking", "'marking' must be an object or a number (the mark rate)")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**63:
        raise _fail(path, text, "seed", f"'seed' must be a non-negative integer, got {seed!r}")
    output_dir = raw.get("output_dir", defaults.output_dir)
    if not isinstance(output_dir, str) or not output_dir:
        raise _fail(path, text, "output_dir", "'output_dir' must be a non-empty string")

    try:
        spec = ExperimentSpec(
            problem=problem,
            engines=engines,
            replacements=replacements,
            regen=regen,
            crossover_rates=tuple(float(r) for r in rates),
            runs=_int(raw, "runs", defaults.runs, path, text),
            iterations=_int(raw, "iterations", defaults.iterations, path, text),
            pop_size=_int(raw, "pop_size", defaults.pop_size, path, text, minimum=2),
            tournament_k=_int(raw, "tournament_k", defaults.tournament_k, path, text),
            mutation=mutation,
            marking=MarkingParams(**marking),
            periods=_periods(raw["periods"], path, text) if "periods" in raw else defaults.periods,
            seed=seed,
            output_dir=output_dir,
        )
        labels = [c.label for c in spec.cells()]  # validates every EngineConfig
    except ConfigError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise ConfigError(f"{path}: {exc}") from None
    except (TypeError, ValueError) as exc:
        key = "marking" if "marking" in raw else None
        raise _fail(path, text, key, str(exc)) from None
    if len(set(labels)) != len(labels):
        raise _fail(path, text, "crossover_rates", "crossover rates produce duplicate cell labels")
    return spec


# --------------------------------------------------------------------------
# experiment grid


def _run_task(task):
    config, problem_name = task
    trace = run(config, get_problem(problem_name))
    return trace.best_fitness_per_iteration, trace.final_fitness, trace.best_iteration


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def run_grid(spec: ExperimentSpec, jobs: int = 1, out_dir=None) -> int:
    """Run every cell, then write traces, ``summary.csv`` and ``samples.csv``.

    Runs may execute in worker processes; files are written only here, after all
    runs finish, in (cell, run) order, so the output does not depend on ``jobs``.
    """
    from dataclasses import replace

    out = Path(out_dir if out_dir is not None else spec.output_dir)
    cells = spec.cells()
    tasks = [(replace(c.config, seed=c.config.seed + r), spec.problem) for c in cells for r in range(spec.runs)]
    log.info("%d cells x %d runs on %s", len(cells), spec.runs, spec.problem)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_task(t) for t in tasks]

    (out / "traces").mkdir(parents=True, exist_ok=True)
    summary, samples = [], []
    for i, cell in enumerate(cells):
        chunk = results[i * spec.runs:(i + 1) * spec.runs]
        curves = np.stack([c[0] for c in chunk])
        finals = np.array([c[1] for c in chunk])
        iters = np.array([c[2] for c in chunk], dtype=np.float64)
        median_curve = np.median(curves, axis=0)
        _write_csv(out / "traces" / f"{cell.label}.csv", ("iteration", "best_fitness"),
                   ((it, _fmt(v)) for it, v in enumerate(median_curve)))
        std = float(np.std(finals, ddof=1)) if finals.size > 1 else 0.0
        summary.append((cell.label, _fmt(np.median(finals)), _fmt(std), _fmt(np.median(iters))))
        samples.append(finals)
    _write_csv(out / "summary.csv", ("label", "median", "std", "iteration_of_best"), summary)
    _write_csv(out / "samples.csv", [c.label for c in cells],
               ([_fmt(col[r]) for col in samples] for r in range(spec.runs)))
    return EXIT_OK


# --------------------------------------------------------------------------
# statistics reports

STATS_MODES = ("anova", "pairwise", "wilcoxon")


def load_groups(paths: Sequence) -> list[stats.SampleGroup]:
    groups = []
    for p in paths:
        groups.extend(stats.read_groups_csv(p))
    labels = [g.label for g in groups]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate column labels across input files")
    return groups


def stats_report(sample_csvs: Sequence, mode: str, out_path) -> Path:
    """Write an ANOVA table, a BH-adjusted p-value matrix, or V/p per classic-vs-ReGen pairing."""
    if mode not in STATS_MODES:
        raise ConfigError(f"unknown stats mode {mode!r}; choose from {', '.join(STATS_MODES)}")
    groups = load_groups(sample_csvs)
    out_path = Path(out_path)
    if mode == "anova":
        a = stats.anova_one_way(groups)
        rows = [
            ("between_groups", _fmt(a.ss_between), a.df_between, _fmt(a.ms_between), _fmt(a.f_statistic), _fmt(a.p_value)),
            ("within_groups", _fmt(a.ss_within), a.df_within, _fmt(a.ms_within), "", ""),
            ("total", _fmt(a.ss_total), a.df_total, "", "", ""),
        ]
        _write_csv(out_path, ("source", "ss", "df", "ms", "f", "p_value"), rows)
    elif mode == "pairwise":
        pw = stats.pairwise_t_bh(groups)
        rows = []
        for i, label in enumerate(pw.labels):
            rows.append([label] + [_fmt(pw.adjusted[i, j]) if j < i else "" for j in range(len(pw.labels))])
        _write_csv(out_path, ["group", *pw.labels], rows)
    else:
        rows = []
        for family, x, y in stats.regen_pairings(groups):
            w = stats.wilcoxon_signed_rank(x, y)
            rows.append((f"{family}_vs_ReGen{family}", _fmt(w.v), _fmt(w.p_value), _fmt(w.log_p_value), w.n))
        _write_csv(out_path, ("pairing", "v", "p_value", "log_p_value", "n"), rows)
    return out_path


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regen-ea", description="Epigenetic (ReGen) evolutionary algorithms.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment grid from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--seed", type=int, help="override the config's base seed")
    p_run.add_argument("--out", help="override the config's output directory")

    p_stats = sub.add_parser("stats", help="analyse column-aligned sample CSVs")
    p_stats.add_argument("--mode", required=True, choices=STATS_MODES)
    p_stats.add_argument("--input", required=True, nargs="+")
    p_stats.add_argument("--out", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one bit string")
    p_eval.add_argument("--problem", required=True)
    p_eval.add_argument("--bits", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            spec = parse_config(args.config)
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("--seed must be non-negative")
                from dataclasses import replace

                spec = replace(spec, seed=args.seed)
            return run_grid(spec, jobs=args.jobs, out_dir=args.out)
        if args.command == "stats":
            stats_report(args.input, args.mode, args.out)
            return EXIT_OK
        if args.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {args.problem!r}; choose from {', '.join(PROBLEMS)}")
        print(repr(eval_problem(get_problem(args.problem), as_bits(args.bits))))
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
