"""Command line entry point: ``frolab {check,sweep,cover,inject}``.

Exit status: 0 when every verdict passes, 1 on input errors, 2 when an
inequality fails (or a sweep/injection does not stabilize), 3 when a sweep is
NONMONOTONE and ``--strict`` is set.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from . import catalog, report
from .complex import DEFAULT_FLOAT_TOL, validate_complex
from .covering import build_cover, l2_report, sector_injectivity, torus_cover
from .errors import ConfigError, FrolabError
from .frolicher import frolicher_check, q_injection
from .io import load_cover, loads_complex
from .spectral import check_grid, h_sweep

EXIT_OK, EXIT_INPUT, EXIT_FAILED, EXIT_NONMONOTONE = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    model: str | None = None
    file: str | None = None
    metric_seed: int | None = None
    h_start: float = 1.0
    h_factor: float = 0.5
    h_count: int = 10
    sigma: float = 0.0
    tau: float | None = None      # None means auto
    k: int | None = None
    tolerance: float = DEFAULT_FLOAT_TOL
    strict: bool = False
    format: str = "json"
    out: str | None = None
    gamma_order: int = 1
    figures: str | None = None

    def grid(self) -> list[float]:
        if self.h_count < 1:
            raise ConfigError("--h-count must be positive")
        grid = [self.h_start * self.h_factor ** i for i in range(self.h_count)]
        try:
            return check_grid(grid)
        except ValueError as e:
            raise ConfigError(f"invalid h grid: {e}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("figures")
        d["tau"] = "auto" if self.tau is None else self.tau
        return d


def _tau(text: str):
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--tau expects a number or 'auto', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="catalog name or path to a complex file")
    common.add_argument("--file", help="path to a complex file (cover file for 'cover')")
    common.add_argument("--metric-seed", type=int, default=None)
    common.add_argument("--h-start", type=float, default=1.0)
    common.add_argument("--h-factor", type=float, default=0.5)
    common.add_argument("--h-count", type=int, default=10)
    common.add_argument("--sigma", type=float, default=0.0)
    common.add_argument("--tau", type=_tau, default=None, help="number or 'auto' (half the Δ_0 gap)")
    common.add_argument("--k", type=int, default=None, help="degree (default 1 for sweep, all for inject)")
    common.add_argument("--tolerance", type=float, default=DEFAULT_FLOAT_TOL,
                        help="residual scale for validating FLOAT complexes")
    common.add_argument("--strict", action="store_true", help="NONMONOTONE sweeps exit with status 3")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--gamma-order", type=int, default=1, help="order m of the cyclic deck group")
    common.add_argument("--figures", metavar="DIR", help="also write PNG figures into DIR")

    parser = argparse.ArgumentParser(prog="frolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("check", parents=[common], help="Frolicher-type inequalities of a complex")
    sub.add_parser("sweep", parents=[common], help="spectral injectivity sweep over h")
    sub.add_parser("cover", parents=[common], help="L2 inequalities of a finite cyclic cover")
    sub.add_parser("inject", parents=[common], help="explicit de Rham to Dolbeault injection over h")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(**{k: v for k, v in vars(ns).items()})


def load_input(cfg: RunConfig):
    """Return (complex, metric) from --file/--model and --metric-seed."""
    src = cfg.file or cfg.model
    if src is None:
        raise ConfigError("one of --model or --file is required")
    metric = None
    if cfg.file is None and src in catalog.CATALOG:
        C = catalog.get(src)
    else:
        path = Path(src)
        if not path.is_file():
            raise ConfigError(f"{src!r} is neither a catalog model ({', '.join(catalog.CATALOG)}) nor a file")
        C, metric = loads_complex(path.read_text(encoding="utf-8"), str(path), validate=False)
        validate_complex(C, cfg.tolerance)
    if cfg.metric_seed is not None:
        metric = catalog.random_metric(C, cfg.metric_seed)
    return C, metric


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run_check(cfg: RunConfig) -> int:
    C, _ = load_input(cfg)
    rep = frolicher_check(C)
    if cfg.format == "csv":
        _emit(cfg, rep.to_csv())
    else:
        doc = rep.to_dict()
        doc["config"] = cfg.to_dict()
        _emit(cfg, report.dump_json(doc))
    if cfg.figures:
        report.figure_check(rep, cfg.figures)
    return EXIT_OK if rep.verdict == "PASS" else EXIT_FAILED


def run_sweep(cfg: RunConfig) -> int:
    C, g = load_input(cfg)
    grid = cfg.grid()
    k = 1 if cfg.k is None else cfg.k
    if not 0 <= k <= 2 * C.n:
        raise ConfigError(f"degree k={k} out of range 0..{2 * C.n}")
    if cfg.tau is not None and not 0 <= cfg.sigma < cfg.tau:
        raise ConfigError("need 0 <= sigma < tau")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rec = h_sweep(C, g, k, grid, cfg.sigma, cfg.tau)
    if cfg.format == "csv":
        _emit(cfg, report.sweep_csv(rec))
    else:
        doc = report.sweep_to_dict(rec)
        doc["config"] = cfg.to_dict()
        _emit(cfg, report.dump_json(doc))
    if cfg.figures:
        report.figure_sweep(rec, cfg.figures)
    for w in rec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not rec.monotone and cfg.strict:
        return EXIT_NONMONOTONE
    return EXIT_OK if rec.stabilizes and rec.density_ok else EXIT_FAILED


def run_inject(cfg: RunConfig) -> int:
    C, g = load_input(cfg)
    grid = cfg.grid()
    degrees = range(2 * C.n + 1) if cfg.k is None else [cfg.k]
    witnesses, h_fail, stable = [], {}, True
    for k in degrees:
        ws = [q_injection(C, g, h, k) for h in grid]
        witnesses.extend(ws)
        drops = [w.h for w in ws if not w.injective]
        if drops:
            h_fail[k] = min(drops)
        stable &= ws[-1].injective
    name = C.name or "model"
    if cfg.format == "csv":
        _emit(cfg, report.injection_csv(name, witnesses))
    else:
        doc = report.injection_to_dict(name, witnesses, h_fail)
        doc["config"] = cfg.to_dict()
        _emit(cfg, report.dump_json(doc))
    if cfg.figures:
        report.figure_injection(name, witnesses, cfg.figures)
    return EXIT_OK if stable else EXIT_FAILED


def run_cover(cfg: RunConfig) -> int:
    g = None
    if cfg.file:
        cov = load_cover(cfg.file)
    else:
        C, g = load_input(cfg)
        m = cfg.gamma_order
        if m < 1:
            raise ConfigError("--gamma-order must be >= 1")
        if m == 1:
            cov = build_cover(C, 1)
        elif cfg.model in catalog.CATALOG and cfg.model.startswith("torus"):
            cov = torus_cover(C.n, m)
        else:
            raise ConfigError("covers of order > 1 need a torus model or a cover file (--file)")
    if g is None and cfg.metric_seed is not None:
        g = catalog.random_metric(cov.base, cfg.metric_seed)
    rep = l2_report(cov, g)
    doc = rep.to_dict()
    if cfg.tau is not None or cfg.k is not None:
        k = 1 if cfg.k is None else cfg.k
        tau = 1.0 if cfg.tau is None else cfg.tau
        si = sector_injectivity(cov, g, k, cfg.sigma, tau, cfg.h_start)
        doc["sector_injectivity"] = {
            "k": k, "h": cfg.h_start, "sigma": cfg.sigma, "tau": tau,
            "N_h_gamma": report.num(si.N_h_gamma), "N_0_gamma": report.num(si.N_0_gamma),
            "gamma_inequality": si.gamma_inequality,
            "sectors": [{"character": ch, "verdict": c.verdict, "note": c.note,
                         "sigma_min": report.num(c.sigma_min)} for ch, c in zip(si.characters, si.certificates)],
        }
    if cfg.format == "csv":
        _emit(cfg, rep.to_csv())
    else:
        doc["config"] = cfg.to_dict()
        _emit(cfg, report.dump_json(doc))
    if cfg.figures:
        report.figure_check(rep, cfg.figures)
    return EXIT_OK if rep.verdict == "PASS" else EXIT_FAILED


RUNNERS = {"check": run_check, "sweep": run_sweep, "cover": run_cover, "inject": run_inject}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return RUNNERS[cfg.subcommand](cfg)
    except (FrolabError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
