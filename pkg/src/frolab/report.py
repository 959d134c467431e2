"""Deterministic JSON/CSV emission for sweeps and injections, and optional figures."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .frolicher import InequalityReport, InjectionWitness, render
from .spectral import SweepRecord


def num(x):
    """JSON-safe number: floats keep their shortest round-trip repr, infinities become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return render(x)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) and math.isfinite(v) else num(v) for v in r])
    return buf.getvalue()


SWEEP_COLUMNS = ("h", "N_h_sigma", "N_0_tau", "sigma_min", "resolvent_dist", "rs_criterion", "verdict")


def sweep_to_dict(rec: SweepRecord) -> dict:
    return {
        "model": rec.model,
        "k": rec.k,
        "sigma": rec.sigma,
        "tau": rec.tau,
        "tau_auto": rec.tau_auto,
        "h_star": num(rec.h_star) if rec.h_star is not None else None,
        "monotone": rec.monotone,
        "resolvent_monotone": rec.resolvent_monotone,
        "density_ok": rec.density_ok,
        "warnings": list(rec.warnings),
        "rows": [{c: num(getattr(r, c)) for c in SWEEP_COLUMNS} for r in rec.rows],
    }


def sweep_csv(rec: SweepRecord) -> str:
    return _csv(("model", "k") + SWEEP_COLUMNS,
                [(rec.model, rec.k) + tuple(getattr(r, c) for c in SWEEP_COLUMNS) for r in rec.rows])


INJECT_COLUMNS = ("h", "k", "betti", "dolbeault_total", "rank", "sigma_min", "raw_sigma_min", "verdict")


def injection_row(w: InjectionWitness) -> tuple:
    return (w.h, w.k, w.betti, w.dolbeault_total, w.rank, w.sigma_min, w.raw_sigma_min,
            "INJECTIVE" if w.injective else "DEGENERATE")


def injection_to_dict(model, witnesses: list[InjectionWitness], h_fail: dict) -> dict:
    return {
        "model": model,
        "metric_seed": witnesses[0].metric_seed if witnesses else None,
        "smallest_h_with_rank_drop": {str(k): num(v) for k, v in sorted(h_fail.items())},
        "rows": [dict(zip(INJECT_COLUMNS, map(num, injection_row(w)))) for w in witnesses],
    }


def injection_csv(model, witnesses: list[InjectionWitness]) -> str:
    return _csv(("model",) + INJECT_COLUMNS, [(model,) + injection_row(w) for w in witnesses])


# -- figures -------------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=100, metadata={"Software": None})
    return path


def figure_check(rep: InequalityReport, outdir) -> list[Path]:
    plt = _pyplot()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ks = [r.k for r in rep.degrees]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([k - 0.2 for k in ks], [float(r.b) for r in rep.degrees], width=0.4, label="b^k")
    ax.bar([k + 0.2 for k in ks], [float(r.sum_dbar) for r in rep.degrees], width=0.4, label="sum h^{p,q} dbar")
    ax.set_xlabel("k")
    ax.set_title(f"{rep.model}: Frolicher inequality")
    ax.legend()
    fig.tight_layout()
    out = [_save(fig, outdir / f"{rep.model}_frolicher.png")]
    plt.close(fig)
    return out


def figure_sweep(rec: SweepRecord, outdir) -> list[Path]:
    plt = _pyplot()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    hs = [r.h for r in rec.rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.loglog(hs, [max(r.resolvent_dist, 1e-300) for r in rec.rows], "o-", label="resolvent distance")
    ax.loglog(hs, [max(r.rs_criterion, 1e-300) for r in rec.rows], "s--", label="relative bound")
    ax.set_xlabel("h")
    ax.set_title(f"{rec.model}: k={rec.k}")
    ax.legend()
    fig.tight_layout()
    out = [_save(fig, outdir / f"{rec.model}_k{rec.k}_sweep.png")]
    plt.close(fig)
    return out


def figure_injection(model, witnesses: list[InjectionWitness], outdir) -> list[Path]:
    plt = _pyplot()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for k in sorted({w.k for w in witnesses}):
        ws = [w for w in witnesses if w.k == k and math.isfinite(w.sigma_min)]
        if ws:
            ax.semilogx([w.h for w in ws], [w.sigma_min for w in ws], "o-", label=f"k={k}")
    ax.set_xlabel("h")
    ax.set_ylabel("sigma_min")
    ax.set_title(f"{model}: explicit injection")
    ax.legend()
    fig.tight_layout()
    out = [_save(fig, outdir / f"{model}_injection.png")]
    plt.close(fig)
    return out
