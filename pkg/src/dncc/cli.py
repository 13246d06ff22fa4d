"""Command-line front end: analytic curves, simulations, DMT tables, and
matrix validation, all driven by key/value config files.

Exit codes: 0 success, 1 usage or config error, 2 computation infeasible,
3 internal error.  Output files land in --out-dir (or $DNCC_OUTPUT_DIR),
named after scheme and problem size, and are byte-reproducible from
(config, seed, version).
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

from . import __version__, analytic, simulator
from .channel import ConfigError, ScenarioConfig, load_config
from .coding import (
    CodingMatrix,
    InfeasibleError,
    build_mds_matrix,
    default_field,
    find_dependent_subset,
    kruskal_rank,
    min_extension_degree,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_INTERNAL = 3

ALL_SCHEMES = ("dncc", "ncc", "cc")


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems as config errors (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, value = item.partition("=")
        out[key.strip()] = value.strip()
    return out


def _load_config(args) -> ScenarioConfig:
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return load_config(path, _parse_overrides(args.set))


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get("DNCC_OUTPUT_DIR") or "dncc-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _tag(cfg: ScenarioConfig) -> str:
    return f"{cfg.scheme}_N{cfg.N}M{cfg.M}"


def _plot_outage(path: Path, series: list[dict], title: str) -> None:
    """Log-y outage vs SNR(dB); series dicts: x, y, label, style, yerr."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for s in series:
        if s.get("yerr") is not None:
            ax.errorbar(s["x"], s["y"], yerr=s["yerr"], fmt=s.get("style", "o"),
                        label=s["label"], capsize=3, markersize=4)
        else:
            ax.plot(s["x"], s["y"], s.get("style", "-"), label=s["label"])
    ax.set_yscale("log")
    ax.set_xlabel("average SNR (dB)")
    ax.set_ylabel("outage probability")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_dmt(path: Path, curves: list[analytic.DmtCurve]) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for c in curves:
        r = [p[0] for p in c.points]
        d = [p[1] for p in c.points]
        ax.plot(r, d, label=f"{c.scheme} (N={c.N}, M={c.M})")
    ax.set_xlabel("multiplexing gain r")
    ax.set_ylabel("diversity gain d(r)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# -- subcommands -----------------------------------------------------------------

def cmd_analytic(args) -> int:
    cfg = _load_config(args)
    if cfg.scheme != "dncc":
        raise ConfigError("analytic curves exist for the dncc scheme only")
    curve = analytic.analytic_curve(cfg)
    out = _out_dir(args)
    comments = ["closed-form outage: strict-decoding multicast-rank model"]
    comments += [f"config: {line}" for line in _config_echo(cfg)]
    csv_path = out / f"analytic_{_tag(cfg)}.csv"
    analytic.write_analytic_csv(curve, csv_path, comments)
    print(f"wrote {csv_path}")
    if args.plot:
        svg = out / f"analytic_{_tag(cfg)}.svg"
        x = [row[0] for row in curve.rows]
        _plot_outage(
            svg,
            [
                {"x": x, "y": [r[1] for r in curve.rows], "label": "exact", "style": "-"},
                {"x": x, "y": [r[2] for r in curve.rows], "label": "high-SNR asymptote",
                 "style": "--"},
                {"x": x, "y": [r[3] for r in curve.rows], "label": "system", "style": ":"},
            ],
            f"dncc outage, N={cfg.N}, M={cfg.M}, beta={cfg.beta:g}, R={cfg.system_rate:g}",
        )
        print(f"wrote {svg}")
    return EXIT_OK


def _config_echo(cfg: ScenarioConfig) -> list[str]:
    from .channel import config_lines

    return config_lines(cfg)


def _resolve_cli_matrix(cfg: ScenarioConfig, args) -> CodingMatrix | None:
    if getattr(args, "matrix", None):
        path = Path(args.matrix)
        if not path.is_file():
            raise ConfigError(f"matrix file not found: {path}")
        return CodingMatrix.load(path)
    return None


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    A = simulator.resolve_matrix(cfg, _resolve_cli_matrix(cfg, args))
    out = _out_dir(args)
    print(f"simulate: {cfg.scheme} N={cfg.N} M={cfg.M} traffic={cfg.traffic} "
          f"trials={cfg.trials} points={len(cfg.rho_db)}")
    estimates = simulator.run_monte_carlo(cfg, A, workers=args.workers)
    comments = [f"config: {line}" for line in _config_echo(cfg)]
    for est in estimates:
        if 0 < est.total_events < 100:
            comments.append(
                f"warning: only {est.total_events} outage events at "
                f"rho_db={est.rho_db:g}; estimate is low-confidence"
            )
    csv_path = out / f"sim_{_tag(cfg)}_{cfg.traffic}.csv"
    simulator.write_results_csv(estimates, cfg, A, csv_path, comments)
    manifest = out / f"manifest_{_tag(cfg)}_{cfg.traffic}.txt"
    simulator.write_manifest(cfg, A, manifest, __version__)
    print(f"wrote {csv_path}")
    print(f"wrote {manifest}")
    if args.plot:
        svg = out / f"sim_{_tag(cfg)}_{cfg.traffic}.svg"
        x = [e.rho_db for e in estimates]
        series = [{
            "x": x,
            "y": [e.average_p for e in estimates],
            "yerr": [1.96 * _avg_stderr(e) for e in estimates],
            "label": f"{cfg.scheme} simulated",
            "style": "o",
        }]
        if cfg.scheme == "dncc":
            curve = analytic.analytic_curve(cfg)
            series.append({"x": x, "y": [r[1] for r in curve.rows],
                           "label": "closed form (strict decoding)", "style": "-"})
        _plot_outage(svg, series, f"{cfg.scheme} outage, N={cfg.N}, M={cfg.M}")
        print(f"wrote {svg}")
    return EXIT_OK


def _avg_stderr(est: simulator.OutageEstimate) -> float:
    """Standard error of the per-destination average estimate."""
    p = est.average_p
    return (p * (1.0 - p) / (est.N * est.trials)) ** 0.5


def cmd_dmt(args) -> int:
    schemes = [s.strip().lower() for s in args.schemes.split(",") if s.strip()]
    for s in schemes:
        if s not in ALL_SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}")
    curves = [analytic.dmt_curve(s, args.N, args.M, args.samples) for s in schemes]
    out = _out_dir(args)
    csv_path = out / f"dmt_N{args.N}M{args.M}.csv"
    analytic.write_dmt_csv(curves, csv_path)
    print(f"wrote {csv_path}")
    if args.plot:
        svg = out / f"dmt_N{args.N}M{args.M}.svg"
        _plot_dmt(svg, curves)
        print(f"wrote {svg}")
    return EXIT_OK


def cmd_validate_matrix(args) -> int:
    if args.matrix:
        path = Path(args.matrix)
        if not path.is_file():
            raise ConfigError(f"matrix file not found: {path}")
        A = CodingMatrix.load(path)
        source = str(path)
    else:
        if args.N is None or args.M is None:
            raise ConfigError("give --matrix FILE, or --N and --M")
        field = default_field(args.N, args.M, args.L, args.poly)
        A = build_mds_matrix(args.N, args.M, field)
        source = "built-in construction"
    kappa = kruskal_rank(A)
    print(f"matrix: {source}")
    print(f"field: GF(2^{A.field.L}), polynomial 0b{A.field.poly:b} ({A.field.poly})")
    print(f"size: {A.N + A.M} rows x {A.N} columns (N={A.N}, M={A.M})")
    print(f"kruskal rank: {kappa}")
    if kappa == A.N:
        print(f"PASS: every {A.N} rows are linearly independent")
    else:
        bad = find_dependent_subset(A, kappa + 1)
        print(f"FAIL: kruskal rank {kappa} < N={A.N}; "
              f"dependent row subset: {list(bad) if bad else '?'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    base = _load_config(args)
    out = _out_dir(args)
    results = {}
    configs = {}
    for scheme in ALL_SCHEMES:
        # The baselines decode one packet per destination, so comparisons
        # run unicast across the board.
        cfg = base.with_overrides(scheme=scheme, traffic="unicast")
        A = simulator.resolve_matrix(cfg, None)
        print(f"simulate: {scheme} N={cfg.N} M={cfg.M} trials={cfg.trials} "
              f"points={len(cfg.rho_db)}")
        estimates = simulator.run_monte_carlo(cfg, A, workers=args.workers)
        csv_path = out / f"sim_{_tag(cfg)}_{cfg.traffic}.csv"
        comments = [f"config: {line}" for line in _config_echo(cfg)]
        simulator.write_results_csv(estimates, cfg, A, csv_path, comments)
        simulator.write_manifest(cfg, A, out / f"manifest_{_tag(cfg)}_{cfg.traffic}.txt",
                                 __version__)
        print(f"wrote {csv_path}")
        results[scheme] = estimates
        configs[scheme] = cfg
    if args.plot:
        svg = out / f"compare_N{base.N}M{base.M}.svg"
        series = []
        for scheme, estimates in results.items():
            series.append({
                "x": [e.rho_db for e in estimates],
                "y": [e.average_p for e in estimates],
                "yerr": [1.96 * _avg_stderr(e) for e in estimates],
                "label": f"{scheme} simulated",
                "style": {"dncc": "o", "ncc": "s", "cc": "^"}[scheme],
            })
        curve = analytic.analytic_curve(configs["dncc"])
        series.append({"x": [r[0] for r in curve.rows], "y": [r[1] for r in curve.rows],
                       "label": "dncc closed form (strict decoding)", "style": "-"})
        _plot_outage(svg, series, f"scheme comparison, N={base.N}, M={base.M}")
        print(f"wrote {svg}")
    return EXIT_OK


# -- argument wiring ----------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", "-c", required=True, help="key/value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    p.add_argument("--out-dir", "-o", default=None,
                   help="output directory (default $DNCC_OUTPUT_DIR or ./dncc-out)")
    p.add_argument("--plot", action="store_true", help="also write SVG plots")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dncc", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"dncc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form outage curves")
    _add_common(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte-Carlo outage run")
    _add_common(p)
    p.add_argument("--matrix", help="coding matrix file (default: built MDS matrix)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="parallel workers over SNR grid points")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dmt", help="diversity-multiplexing tradeoff curves")
    p.add_argument("--N", type=int, required=True, help="source-destination pairs")
    p.add_argument("--M", type=int, required=True, help="relays")
    p.add_argument("--schemes", default="dncc,ncc,cc", help="comma-separated subset")
    p.add_argument("--samples", type=int, default=101, help="points per polyline")
    _add_common(p, config=False)
    p.set_defaults(func=cmd_dmt)

    p = sub.add_parser("validate-matrix", help="check the any-N-rows property")
    p.add_argument("--matrix", help="matrix file to validate")
    p.add_argument("--N", type=int, help="sources (build the default matrix)")
    p.add_argument("--M", type=int, help="relays (build the default matrix)")
    p.add_argument("--L", type=int, help="field extension degree")
    p.add_argument("--poly", type=int, help="field polynomial bitmask")
    p.set_defaults(func=cmd_validate_matrix)

    p = sub.add_parser("compare", help="run all three schemes on one grid")
    _add_common(p)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
