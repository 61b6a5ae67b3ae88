"""Command-line front end: ``photon-certify {analyze,simulate,ingest,polytope,bound}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .benchmarks import (
    ApparatusBounds,
    PolytopePoint,
    clamp_unit,
    multimode_p1_tilde,
    p1_hat,
    p1_hat_R,
    p1_hat_star,
    p1_hat_star_R,
    p1_hat_star_T,
    p1_hat_T,
    polytope_export,
)
from .detection_model import (
    ApparatusParams,
    ClickCounts,
    click_probabilities,
    click_probabilities_multimode,
    sample_counts,
)
from .errors import DataError, DegenerateError, DomainError, NumericError
from .finite_stats import ConfidenceQuery, StatReport, parse_alpha, stat_report
from .photon_states import MultimodeProductState, load_state_spec
from .timetag_ingest import IngestConfig, bin_trials, parse_timetags
from .wigner import disk_negativity_bound, negativity_lower_bound, negativity_oracle

log = logging.getLogger("photon_certify")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
DEFAULT_ALPHA = "1e-10"


class UsageError(Exception):
    pass


# -- JSON helpers --------------------------------------------------------------------

def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dumps(obj, full_precision: bool = False) -> str:
    """Deterministic JSON: fixed key order, floats capped at 12 significant digits."""
    if not full_precision:
        obj = _round_floats(obj)
    return json.dumps(obj, indent=2) + "\n"


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None
    except IsADirectoryError:
        raise UsageError(f"expected a file, got a directory: {path}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON in {path}: {exc}") from None


def _json_arg(value: str):
    """A JSON document given inline or as a file path."""
    if value.lstrip().startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid inline JSON: {exc}") from None
    return _read_json(value)


# -- certification report ------------------------------------------------------------

@dataclass(frozen=True)
class CertificationReport:
    """Point estimates and confidence figures for one counts dataset."""

    counts: ClickCounts
    alpha: float
    p1_hat_T: float
    p1_hat_R: float
    p1_hat: float
    p1_tilde: float
    stats: StatReport
    bounds: ApparatusBounds | None = None
    p1_hat_star_T: float | None = None
    p1_hat_star_R: float | None = None
    p1_hat_star: float | None = None
    source: str | None = None

    def to_json(self) -> dict:
        s = self.stats
        out = {"source": self.source, "n": self.counts.n, "alpha": self.alpha,
               "counts": self.counts.to_json()}
        if self.bounds is not None:
            out["bounds"] = self.bounds.to_json()
        out.update({"p1_hat_T": self.p1_hat_T, "p1_hat_R": self.p1_hat_R, "p1_hat": self.p1_hat})
        if self.bounds is not None:
            out.update({
                "p1_hat_star_T": self.p1_hat_star_T,
                "p1_hat_star_R": self.p1_hat_star_R,
                "p1_hat_star": self.p1_hat_star,
                "p1_hat_star_clamped": clamp_unit(self.p1_hat_star),
            })
        out.update({
            "p1_tilde": self.p1_tilde,
            "min_xbar": s.min_xbar,
            "q_alpha": s.q_alpha,
            "p_value": s.p_value,
            "log10_p_value": s.log10_p_value,
            "nw_alpha": s.nw_alpha,
            "nw_alpha_disk": s.nw_alpha_disk,
        })
        if self.bounds is not None:
            out.update({
                "q_alpha_star": s.q_alpha_star,
                "nw_alpha_star": s.nw_alpha_star,
                "nw_alpha_star_disk": s.nw_alpha_star_disk,
            })
        out["q_alpha_tilde"] = s.q_alpha_tilde
        return out

    def to_table(self) -> str:
        s = self.stats
        rows = [
            ("P1_T", "P1_R", "q_alpha", "nw_alpha", "p-value"),
            (_f3(self.p1_hat_T), _f3(self.p1_hat_R), _f3(s.q_alpha), _f3(s.nw_alpha),
             _pvalue_text(s.p_value, s.log10_p_value)),
        ]
        blocks = [_align(rows)]
        if self.bounds is not None:
            blocks.append(_align([
                ("P1_T*", "P1_R*", "q*_alpha", "nw*_alpha"),
                (_f3(self.p1_hat_star_T), _f3(self.p1_hat_star_R), _f3(s.q_alpha_star),
                 _f3(s.nw_alpha_star)),
            ]))
        blocks.append(_align([("P1~", "q~_alpha"), (_f3(self.p1_tilde), _f3(s.q_alpha_tilde))]))
        head = f"n = {self.counts.n}, alpha = {self.alpha:g}"
        if self.source:
            head = f"{self.source}: {head}"
        return head + "\n\n" + "\n\n".join(blocks) + "\n"


def _f3(v):
    return f"{v:.3f}"


def _pvalue_text(p, log10_p):
    if log10_p == 0.0:
        return "x"
    if p >= 1e-3:
        return f"{p:.3g}"
    exponent = math.floor(log10_p)
    return f"{10 ** (log10_p - exponent):.2f}e{exponent:+d}"


def _align(rows):
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def certify(counts: ClickCounts, alpha, bounds: ApparatusBounds | None = None,
            source: str | None = None) -> CertificationReport:
    """Run every benchmark and confidence bound on one dataset."""
    query = ConfidenceQuery(counts, alpha, bounds)
    freq = counts.frequencies()
    star = {}
    if bounds is not None:
        star = {"p1_hat_star_T": p1_hat_star_T(freq, bounds),
                "p1_hat_star_R": p1_hat_star_R(freq, bounds),
                "p1_hat_star": p1_hat_star(freq, bounds)}
    return CertificationReport(
        counts=counts, alpha=query.alpha,
        p1_hat_T=p1_hat_T(freq), p1_hat_R=p1_hat_R(freq), p1_hat=p1_hat(freq),
        p1_tilde=multimode_p1_tilde(freq), stats=stat_report(query),
        bounds=bounds, source=source, **star,
    )


# -- subcommands ---------------------------------------------------------------------

def _load_bounds(path):
    if path is None:
        return None
    data = _json_arg(path)
    if not isinstance(data, dict):
        raise DataError("bounds JSON must be an object")
    return ApparatusBounds.from_json(data)


def _counts_from(path) -> ClickCounts:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise DataError(f"{path}: counts JSON must be an object")
    counts = ClickCounts.from_json(data)
    if counts.n < 1:
        raise DataError(f"{path}: counts are all zero")
    return counts


def cmd_analyze(args, out):
    alpha = parse_alpha(args.alpha)
    bounds = _load_bounds(args.bounds)
    if args.batch:
        directory = Path(args.batch)
        if not directory.is_dir():
            raise UsageError(f"not a directory: {directory}")
        reports = {}
        for path in sorted(directory.glob("*.json")):
            reports[path.name] = certify(_counts_from(str(path)), alpha, bounds, source=path.name)
        _emit_reports(list(reports.values()), args.format, out, batch=True)
        return
    if args.counts is None:
        raise UsageError("analyze needs a counts file (or --batch DIR)")
    source = "stdin" if args.counts == "-" else Path(args.counts).name
    report = certify(_counts_from(args.counts), alpha, bounds, source=source)
    _emit_reports([report], args.format, out, batch=False)


def _emit_reports(reports, fmt, out, batch):
    if fmt in ("table", "both"):
        out.write("\n".join(r.to_table() for r in reports))
    if fmt in ("json", "both"):
        if fmt == "both":
            out.write("\n")
        if batch:
            out.write(dumps({r.source: r.to_json() for r in reports}))
        else:
            out.write(dumps(reports[0].to_json()))


def cmd_simulate(args, out):
    state = load_state_spec(args.state)
    apparatus = ApparatusParams.ideal()
    if args.apparatus is not None:
        data = _json_arg(args.apparatus)
        if not isinstance(data, dict):
            raise DataError("apparatus JSON must be an object")
        apparatus = ApparatusParams.from_json(data)
    if isinstance(state, MultimodeProductState):
        p = click_probabilities_multimode(state, apparatus)
    else:
        p = click_probabilities(state, apparatus)
    if args.exact:
        # full precision so the output feeds back into the benchmarks exactly
        out.write(dumps(p.to_json(), full_precision=True))
        return
    if args.trials is None:
        raise UsageError("simulate needs -n/--trials unless --exact is given")
    out.write(dumps(sample_counts(p, args.trials, args.seed).to_json()))


def cmd_ingest(args, out):
    config = IngestConfig(window_ps=args.window_ps, delay_R_ps=args.delay_r_ps,
                          delay_T_ps=args.delay_t_ps, dead_ps=args.dead_ps)
    events = parse_timetags(_read_text(args.timetags))
    out.write(dumps(bin_trials(events, config).to_json()))


def cmd_polytope(args, out):
    points = [PolytopePoint.from_probabilities(_counts_from(p).frequencies()) for p in args.points]
    out.write(dumps(polytope_export(args.P, points)))


def cmd_bound(args, out):
    if args.p1 is None and args.state is None:
        raise UsageError("bound needs --p1 and/or --state")
    result = {}
    if args.state is not None:
        state = load_state_spec(args.state)
        if isinstance(state, MultimodeProductState):
            raise UsageError("bound --state takes a single-mode state")
        result["state_p1"] = state.p1
        result["negativity_oracle"] = negativity_oracle(state)
    p1 = args.p1 if args.p1 is not None else result["state_p1"]
    fb = negativity_lower_bound(p1)
    result.update({
        "p1": p1,
        "F": fb.value,
        "disk_radius_sq": fb.disk_radius_sq,
        "F_disk": disk_negativity_bound(p1).value,
    })
    out.write(dumps(result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-certify",
        description="Certify single-photon sources from auto-correlation click statistics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="certification report for a counts file")
    p.add_argument("counts", nargs="?", help="counts JSON file, or '-' for stdin")
    p.add_argument("--alpha", default=DEFAULT_ALPHA, help="confidence parameter (default 1e-10)")
    p.add_argument("--bounds", help="apparatus bounds JSON (file or inline)")
    p.add_argument("--format", choices=("json", "table", "both"), default="json")
    p.add_argument("--batch", metavar="DIR", help="analyze every *.json in DIR")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="sample counts (or exact probabilities) for a state")
    p.add_argument("state", help="state JSON file, inline JSON, 'fock:n' or 'lossy_single_photon:eta'")
    p.add_argument("--apparatus", help='apparatus JSON (file or inline), e.g. {"t":0.5,"eta_T":1,"eta_R":1}')
    p.add_argument("-n", "--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="emit click probabilities instead of counts")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="bin a time-tag TSV into counts")
    p.add_argument("timetags", help="time-tag TSV file, or '-' for stdin")
    p.add_argument("--window-ps", type=int, default=1000)
    p.add_argument("--delay-r-ps", type=int, default=0)
    p.add_argument("--delay-t-ps", type=int, default=0)
    p.add_argument("--dead-ps", type=int, default=0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("polytope", help="polytope vertices (and data points) as plot data")
    p.add_argument("--P", type=float, nargs="+", default=[0.25, 0.5, 0.75, 1.0])
    p.add_argument("--points", nargs="*", default=[], metavar="COUNTS", help="counts files to place as points")
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("bound", help="negativity bound F(P1), its disk, and the numerical N_W")
    p.add_argument("--p1", type=float)
    p.add_argument("--state", help="state spec; adds the quadrature value of N_W")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"photon-certify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DegenerateError) as exc:
        print(f"photon-certify: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"photon-certify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"photon-certify: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
