"""Canonical text serialization of complexes, metrics and covers.

Complex files are JSON with a fixed field order::

    {"n": ..., "mode": "exact"|"float",
     "spaces": [{"p", "q", "dim", "labels"}],
     "del":  [{"p", "q", "entries": [[row, col, re, im], ...]}],
     "dbar": [...],
     "metric": [{"p", "q", "gram": [[row, col, re, im], ...]}]}    (optional)

Exact entries are rational strings "num/den"; float entries are the shortest
round-trip decimal strings. Only nonzero entries and nonzero matrices are
written, so save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import exact, forms
from .complex import EXACT, FLOAT, BigradedComplex, validate_complex
from .errors import ParseError
from .exact import CQ
from .hodge import HermitianMetric


def _line_of(text: str, needle) -> int | None:
    """1-based line of the first occurrence of a JSON literal, best effort."""
    token = json.dumps(needle) if not isinstance(needle, str) else needle
    pos = text.find(token)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


class _Ctx:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, field: str, msg: str, literal=None):
        line = _line_of(self.text, literal) if literal is not None else None
        where = f"{self.source}:{line}" if line else self.source
        raise ParseError(f"{where}: {field}: {msg}", source=self.source, line=line, field=field)


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}:{e.lineno}:{e.colno}: {e.msg}", source=source, line=e.lineno,
                         field=None) from None


def _int(ctx: _Ctx, value, field: str, lo: int = 0, hi: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        ctx.fail(field, f"expected an integer, got {value!r}", value)
    if value < lo or (hi is not None and value > hi):
        ctx.fail(field, f"value {value} out of range", value)
    return value


def _scalar(ctx: _Ctx, mode: str, re, im, field: str):
    if mode == EXACT:
        parts = []
        for part, tag in ((re, "re"), (im, "im")):
            try:
                parts.append(exact.parse_rational(part, ""))
            except ParseError as e:
                ctx.fail(f"{field}.{tag}", e.args[0].split(": ", 1)[-1], part)
        return CQ(*parts)
    try:
        if isinstance(re, bool) or isinstance(im, bool):
            raise ValueError
        z = complex(float(re), float(im))
    except (TypeError, ValueError):
        ctx.fail(field, f"malformed float entry {[re, im]!r}", re)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        ctx.fail(field, "non-finite entry", re)
    return z


def _fmt(mode: str, z) -> tuple[str, str]:
    if mode == EXACT:
        return exact.format_rational(z.re), exact.format_rational(z.im)
    return repr(float(z.real)), repr(float(z.imag))


def _fmt_float(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


def _require(ctx: _Ctx, obj, key: str, kind, where: str):
    if not isinstance(obj, dict) or key not in obj:
        ctx.fail(where, f"missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        ctx.fail(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}", val)
    return val


def parse_complex(data, text: str = "", source: str = "<string>", validate: bool = True):
    """Build (complex, metric or None) from decoded JSON ``data``."""
    ctx = _Ctx(text, source)
    if not isinstance(data, dict):
        ctx.fail("<root>", "expected a JSON object")
    n = _int(ctx, _require(ctx, data, "n", int, "<root>"), "n", lo=1)
    mode = data.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        ctx.fail("mode", f"unknown mode {mode!r}", mode)
    dims, labels = {}, {}
    for i, sp in enumerate(_require(ctx, data, "spaces", list, "<root>")):
        f = f"spaces[{i}]"
        p = _int(ctx, _require(ctx, sp, "p", int, f), f + ".p", 0, n)
        q = _int(ctx, _require(ctx, sp, "q", int, f), f + ".q", 0, n)
        if (p, q) in dims:
            ctx.fail(f, f"duplicate space ({p},{q})")
        dims[(p, q)] = _int(ctx, _require(ctx, sp, "dim", int, f), f + ".dim")
        if "labels" in sp:
            lab = sp["labels"]
            if not isinstance(lab, list) or len(lab) != dims[(p, q)] or not all(isinstance(x, str) for x in lab):
                ctx.fail(f + ".labels", f"expected {dims[(p, q)]} string labels")
            labels[(p, q)] = list(lab)
    mats = {}
    for which, shift in (("del", (1, 0)), ("dbar", (0, 1))):
        table = {}
        for i, blk in enumerate(data.get(which, [])):
            f = f"{which}[{i}]"
            p = _int(ctx, _require(ctx, blk, "p", int, f), f + ".p", 0, n)
            q = _int(ctx, _require(ctx, blk, "q", int, f), f + ".q", 0, n)
            if (p, q) in table:
                ctx.fail(f, f"duplicate matrix at ({p},{q})")
            rows, cols = dims.get((p + shift[0], q + shift[1]), 0), dims.get((p, q), 0)
            mat = exact.zeros(rows, cols) if mode == EXACT else np.zeros((rows, cols), dtype=complex)
            seen = set()
            for j, e in enumerate(_require(ctx, blk, "entries", list, f)):
                fe = f"{f}.entries[{j}]"
                if not isinstance(e, list) or len(e) != 4:
                    ctx.fail(fe, "expected [row, col, re, im]")
                r = _int(ctx, e[0], fe + "[0]", 0, rows - 1)
                c = _int(ctx, e[1], fe + "[1]", 0, cols - 1)
                if (r, c) in seen:
                    ctx.fail(fe, f"duplicate entry ({r},{c})")
                seen.add((r, c))
                mat[r, c] = _scalar(ctx, mode, e[2], e[3], fe)
            table[(p, q)] = mat
        mats[which] = table
    coframe = bool(labels) and all(
        labels.get((p, q)) == [forms.label(n, m) for m in forms.monomials(n, p, q)]
        for p in range(n + 1) for q in range(n + 1))
    C = BigradedComplex(n, dims, mats["del"], mats["dbar"], mode=mode, labels=labels,
                        name=Path(source).stem if source != "<string>" else None, coframe=coframe)
    metric = None
    if "metric" in data:
        grams = {pq: np.eye(d, dtype=complex) for pq, d in C.dims.items()}
        for i, blk in enumerate(data["metric"] if isinstance(data["metric"], list) else ctx.fail("metric", "expected a list")):
            f = f"metric[{i}]"
            p = _int(ctx, _require(ctx, blk, "p", int, f), f + ".p", 0, n)
            q = _int(ctx, _require(ctx, blk, "q", int, f), f + ".q", 0, n)
            d = C.dim(p, q)
            G = np.zeros((d, d), dtype=complex)
            for j, e in enumerate(_require(ctx, blk, "gram", list, f)):
                fe = f"{f}.gram[{j}]"
                if not isinstance(e, list) or len(e) != 4:
                    ctx.fail(fe, "expected [row, col, re, im]")
                r = _int(ctx, e[0], fe + "[0]", 0, d - 1)
                c = _int(ctx, e[1], fe + "[1]", 0, d - 1)
                G[r, c] = _scalar(ctx, FLOAT, e[2], e[3], fe)
            grams[(p, q)] = G
        metric = HermitianMetric(grams)
    if validate:
        validate_complex(C)
    return C, metric


def loads_complex(text: str, source: str = "<string>", validate: bool = True):
    return parse_complex(_parse_json(text, source), text, source, validate)


def load_model(path) -> tuple[BigradedComplex, HermitianMetric | None]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: cannot read file ({e.strerror})", source=str(path)) from None
    return loads_complex(text, str(path))


def load_complex(path) -> BigradedComplex:
    return load_model(path)[0]


def _entries(mode: str, mat) -> list:
    out = []
    for r in range(mat.shape[0]):
        for c in range(mat.shape[1]):
            z = mat[r, c]
            if z:
                out.append([r, c, *_fmt(mode, z)])
    return out


def dumps_complex(C: BigradedComplex, metric: HermitianMetric | None = None) -> str:
    def line(obj):
        return json.dumps(obj, ensure_ascii=False)

    parts = [f'  "n": {C.n}', f'  "mode": {line(C.mode)}']
    spaces = []
    for p, q in C.bidegrees():
        sp = {"p": p, "q": q, "dim": C.dim(p, q)}
        if (p, q) in C.labels:
            sp["labels"] = list(C.labels[(p, q)])
        spaces.append("    " + line(sp))
    parts.append('  "spaces": [\n' + ",\n".join(spaces) + "\n  ]")
    for which in ("del", "dbar"):
        blocks = []
        for (p, q), mat in sorted(C.matrices(which).items()):
            ent = _entries(C.mode, mat)
            if ent:
                blocks.append("    " + line({"p": p, "q": q, "entries": ent}))
        parts.append(f'  "{which}": [' + ("\n" + ",\n".join(blocks) + "\n  ]" if blocks else "]"))
    if metric is not None and not metric.is_identity:
        blocks = []
        for p, q in C.bidegrees():
            G = metric.gram(p, q)
            ent = [[r, c, _fmt_float(G[r, c].real), _fmt_float(G[r, c].imag)]
                   for r in range(G.shape[0]) for c in range(G.shape[1]) if G[r, c] != 0]
            blocks.append("    " + line({"p": p, "q": q, "gram": ent}))
        parts.append('  "metric": [\n' + ",\n".join(blocks) + "\n  ]")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def save_complex(C: BigradedComplex, path, metric: HermitianMetric | None = None) -> None:
    Path(path).write_text(dumps_complex(C, metric), encoding="utf-8")


# -- cover files ---------------------------------------------------------------

def load_cover(path):
    """Read a cover file: {"base": path | catalog name | inline complex, "gammaOrder", "sectors"}."""
    from . import catalog
    from .covering import build_cover, twist

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: cannot read file ({e.strerror})", source=str(path)) from None
    data = _parse_json(text, str(path))
    ctx = _Ctx(text, str(path))
    if not isinstance(data, dict) or "base" not in data:
        ctx.fail("<root>", "missing field 'base'")
    base = data["base"]
    if isinstance(base, dict):
        C, _ = parse_complex(base, text, str(path))
    elif isinstance(base, str):
        ref = (path.parent / base)
        if ref.is_file():
            C = load_complex(ref)
        elif base in catalog.CATALOG:
            C = catalog.get(base)
        else:
            ctx.fail("base", f"no such complex file or catalog model {base!r}", base)
    else:
        ctx.fail("base", "expected a file reference or an inline complex")
    m = _int(ctx, _require(ctx, data, "gammaOrder", int, "<root>"), "gammaOrder", lo=1)
    twists = []
    for i, sec in enumerate(_require(ctx, data, "sectors", list, "<root>")):
        f = f"sectors[{i}]"
        label = sec.get("character", str(i)) if isinstance(sec, dict) else ctx.fail(f, "expected an object")
        thetas = []
        for key in ("theta10", "theta01"):
            raw = sec.get(key, [])
            if not isinstance(raw, list) or (raw and len(raw) != C.n):
                ctx.fail(f"{f}.{key}", f"expected {C.n} [re, im] pairs")
            vals = []
            for j, pair in enumerate(raw):
                if not isinstance(pair, list) or len(pair) != 2:
                    ctx.fail(f"{f}.{key}[{j}]", "expected [re, im]")
                vals.append(_scalar(ctx, C.mode, pair[0], pair[1], f"{f}.{key}[{j}]"))
            thetas.append(vals)
        twists.append(twist(C, str(label), *thetas))
    return build_cover(C, m, twists)


def dumps_cover(cov, base_ref: str | None = None) -> str:
    mode = cov.base.mode
    sectors = []
    for s in cov.sectors:
        conv = (lambda z: list(_fmt(mode, z if mode == FLOAT else CQ._coerce(z))))
        sectors.append("    " + json.dumps({"character": s.character,
                                            "theta10": [conv(z) for z in s.theta10],
                                            "theta01": [conv(z) for z in s.theta01]}))
    if base_ref is not None:
        base = json.dumps(base_ref)
    else:
        base = dumps_complex(cov.base).rstrip("\n").replace("\n", "\n  ")
    return ("{\n" + f'  "base": {base},\n  "gammaOrder": {cov.gamma_order},\n'
            + '  "sectors": [\n' + ",\n".join(sectors) + "\n  ]\n}\n")

