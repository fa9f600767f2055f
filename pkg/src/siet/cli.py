"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 invalid constellation,
3 unrealizable type.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Sequence

from .achievability import achievability_report
from .channel import ChannelParams, estimate_dep
from .code import build_codebook, format_codebook, read_codebook
from .config import Scenario, load_scenario
from .energy import constant_composition_energy, constant_composition_profile, energy_profile
from .errors import (
    Exhausted,
    Infeasible,
    InfeasibleGeometry,
    InvalidConstellation,
    NotAPmf,
    RadiusTooLarge,
    UnrealizableType,
)
from .impossibility import ImpossibilityReport, impossibility_report
from .sweeps import (
    TRADEOFF_FIELDS,
    VERIFY_FIELDS,
    SweepSpec,
    tradeoff_rows,
    format_value,
    oracle_checks,
    regions_rows,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_CONSTELLATION = 2
EXIT_UNREALIZABLE = 3

CSV_VERSION = "1"
# largest M for which the bounds command materializes the codebook
_CODEBOOK_LIMIT = 100_000


def render_csv(rows: Sequence[dict], fields: Iterable[str] | None = None) -> str:
    fields = list(fields) if fields is not None else list(rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([format_value(row[f]) for f in fields])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _sigma2(sc: Scenario) -> float:
    if sc.sigma2 is None:
        raise ValueError("channel.sigma2 is required")
    return sc.sigma2


def _profile(sc: Scenario, spec, codebook=None):
    if codebook is not None:
        return energy_profile(codebook, sc.constellation, sc.model)
    # every codeword carries the same energy, so one representative level suffices
    e = constant_composition_energy(sc.layer_probs, sc.constellation, sc.model, sc.n)
    M = spec.resolved_message_count()
    return constant_composition_profile(e, M if isinstance(M, int) and M <= _CODEBOOK_LIMIT else 1)


def cmd_bounds(sc: Scenario, out: str | None) -> int:
    const = sc.checked_constellation()
    spec = sc.code_spec()
    M = spec.resolved_message_count()
    codebook = None
    if isinstance(M, int) and M <= _CODEBOOK_LIMIT and spec.mode == "sample":
        codebook = build_codebook(spec)
    profile = _profile(sc, spec, codebook)
    sigma2 = _sigma2(sc)
    imp = impossibility_report(const, spec.layer_probs, sc.n, M, sigma2, profile, sc.energy_target, sc.deltas)
    ach = achievability_report(
        const, spec.layer_probs, sc.n, M, sigma2, sc.model, profile, sc.energy_target, sc.deltas,
        codebook=codebook, epsilon=sc.epsilon,
    )
    imp_csv = render_csv([imp.csv_row()], ImpossibilityReport.CSV_FIELDS)
    ach_csv = render_csv([ach.csv_row()])
    if out is None:
        sys.stdout.write(imp_csv + "\n" + ach_csv)
    else:
        base = Path(out)
        stem = base.with_suffix("")
        Path(f"{stem}_impossibility.csv").write_text(imp_csv, encoding="utf-8")
        Path(f"{stem}_achievability.csv").write_text(ach_csv, encoding="utf-8")
    return EXIT_OK


def cmd_sweep_tradeoff(sc: Scenario, out: str | None) -> int:
    sw = sc.sweep
    const = sc.constellation
    if const.num_layers != 2:
        raise ValueError("the two-layer sweep needs a two-layer constellation template")
    rows = tradeoff_rows(
        outer_amplitude=float(const.amplitudes[0]),
        a2=SweepSpec("amplitude_A2", sw["A2"]),
        p=SweepSpec("layer_prob_p", sw["p"]),
        n=sc.n,
        layer_counts=const.counts,
        model=sc.model,
        radii=[float(r) for r in const.radii],
        peak_amplitude=const.peak_amplitude,
    )
    _emit(render_csv(rows, TRADEOFF_FIELDS), out)
    return EXIT_OK


def cmd_sweep_regions(sc: Scenario, out: str | None) -> int:
    sw = sc.sweep
    const = sc.constellation
    step = sw.get("p_step")
    rows = regions_rows(
        outer_amplitude=float(const.amplitudes[0]),
        n=sc.n,
        layer_counts=const.counts,
        sigma2=_sigma2(sc),
        epsilon=SweepSpec("epsilon", sw["epsilon"]),
        model=sc.model,
        p_step=float(step) if step is not None else None,
        peak_amplitude=const.peak_amplitude,
    )
    _emit(render_csv(rows), out)
    return EXIT_OK


def cmd_verify(sc: Scenario, out: str | None) -> int:
    const = sc.checked_constellation()
    codebook = build_codebook(sc.code_spec())
    rows = oracle_checks(
        codebook,
        const,
        _sigma2(sc),
        sc.trials,
        sc.seed,
        disk_radius=float(sc.verify.get("disk_radius", 1.0)),
        equal_radius=float(sc.verify.get("equal_radius", 1.0)),
    )
    _emit(render_csv(rows, VERIFY_FIELDS), out)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_VERIFY_FAILED


def cmd_construct(sc: Scenario, out: str | None) -> int:
    sc.checked_constellation()
    _emit(format_codebook(build_codebook(sc.code_spec())), out)
    return EXIT_OK


def cmd_simulate(sc: Scenario, out: str | None, codebook_path: str, decoder: str, shards: int) -> int:
    const = sc.checked_constellation()
    codebook = read_codebook(codebook_path)
    est = estimate_dep(codebook, const, ChannelParams(_sigma2(sc), sc.seed, sc.trials), decoder, shards=shards)
    _emit(render_csv([est.csv_row()]), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="siet", description="Finite-blocklength information and energy transmission bounds.")
    parser.add_argument("--version", action="version", version=f"siet csv v{CSV_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario YAML file")
        p.add_argument("--out", help="output path (overwritten); stdout when omitted")
        p.add_argument("--seed", type=int, help="override channel.seed")
        p.add_argument("--trials", type=int, help="override channel.trials")
        return p

    common(sub.add_parser("bounds", help="impossibility and achievability reports"))
    common(sub.add_parser("sweep-figbr", aliases=["sweep-tradeoff"], help="energy and rate over (p, A2) for two layers"))
    common(sub.add_parser("sweep-regions", help="achievable (R, B) points per target DEP"))
    common(sub.add_parser("verify", help="Monte Carlo checks of the closed-form DEP expressions"))
    common(sub.add_parser("construct", help="write a codebook file"))
    sim = common(sub.add_parser("simulate", help="Monte Carlo DEP of a codebook file"))
    sim.add_argument("--codebook", required=True)
    sim.add_argument("--decoder", choices=("min_distance", "circular"), default="min_distance")
    sim.add_argument("--shards", type=int, default=1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.config)
        if args.seed is not None:
            sc.seed = args.seed
        if args.trials is not None:
            sc.trials = args.trials
        out = args.out if args.out is not None else sc.output
        if args.command == "bounds":
            return cmd_bounds(sc, out)
        if args.command in ("sweep-figbr", "sweep-tradeoff"):
            return cmd_sweep_tradeoff(sc, out)
        if args.command == "sweep-regions":
            return cmd_sweep_regions(sc, out)
        if args.command == "verify":
            return cmd_verify(sc, out)
        if args.command == "construct":
            return cmd_construct(sc, out)
        return cmd_simulate(sc, out, args.codebook, args.decoder, args.shards)
    except InvalidConstellation as exc:
        print("invalid constellation:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID_CONSTELLATION
    except (InfeasibleGeometry, RadiusTooLarge) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONSTELLATION
    except (UnrealizableType, Infeasible, NotAPmf, Exhausted) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNREALIZABLE
    except (ValueError, KeyError, OSError) as exc:
        # malformed scenario: same code argparse uses for usage errors
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
