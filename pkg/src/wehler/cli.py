"""Batch command-line surface: reduction, scans, construction, figure data.

Configuration is layered: built-in defaults, then an INI file (section
``[wehler]``, path from ``--config`` or the ``WEHLER_CONFIG`` environment
variable), then explicit flags.  The fields that influence computed values
are hashed and the hash is stamped into every output, so an artifact can be
reproduced bit for bit from its own metadata block.  Worker count and
output paths are deliberately outside the hash and the metadata: the row
assembly is ordered, so parallelism never changes the emitted bytes.

CSV outputs are UTF-8 with ``#``-prefixed metadata lines, then a header row
in the declared column order, then one row per grid point; a failing grid
point keeps its row with the failure in the ``error`` column.  JSON output
carries the same rows with every scalar rendered as a decimal string
(binary floats never appear in artifacts).

Exit codes: 0 success, 1 usage/schema errors, 2 cap or convergence
exhaustion.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

import mpmath

from . import __version__, asymptotics
from .boundary import (
    BoundaryPointSpec,
    ExplicitIsotropic,
    cusp_triangle_arc,
    materialize_with_certificate,
)
from .chamber import Word, reduce_to_chamber
from .cusp import (
    CuspId,
    ExcursionSchedule,
    delta_inf_target,
    geometric_schedule,
    polynomial_schedule,
    schedule_limit_vector,
    supergeometric_schedule,
)
from .errors import InvalidSpec, ResourceError, WehlerError
from .lattice import omega_hat, pair_with_u, u_vector, vector
from .scalars import Context

RAY_COLUMNS = (
    "s",
    "t",
    "vol",
    "log_vol_over_log_s",
    "phi",
    "word_length",
    "clamped",
    "fitted_slope",
    "error",
)
H0_COLUMNS = (
    "m",
    "h0",
    "log_h0_over_log_m",
    "word_length",
    "lower",
    "upper",
    "error",
)
FIGURE_COLUMNS = ("t", "s", "vol", "error")


# -- configuration ----------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    n: int = 3
    backend: str = "float"
    prec: int = 256
    max_steps: int = 0  # 0 -> library default step cap
    base: int = 2
    q_min: int = 4
    q_max: int = 30
    m_exp_max: int = 20
    t_count: int = 33
    truncation_depth: int = 0  # 0 -> full schedule depth
    window: int = 5
    seed: int = 0
    workers: int = 0  # 0 -> cpu count; not hashed, must not affect bytes
    out: str = ""
    format: str = "csv"


_CFG_FIELDS = {f.name: f.type for f in fields(RunConfig)}
# the subset that determines the numbers (not where or how wide they run)
_HASH_FIELDS = tuple(
    sorted(set(_CFG_FIELDS) - {"workers", "out", "format"})
)


def _load_config(args) -> RunConfig:
    values = dict(getattr(args, "cmd_defaults", None) or {})
    path = getattr(args, "config", None) or os.environ.get("WEHLER_CONFIG")
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise InvalidSpec(f"config file not found: {path}")
        if not parser.has_section("wehler"):
            raise InvalidSpec(f"config file {path} has no [wehler] section")
        for key, raw in parser.items("wehler"):
            if key not in _CFG_FIELDS:
                raise InvalidSpec(f"unknown config key {key!r} in {path}")
            values[key] = raw
    for key in _CFG_FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    merged = {}
    for key, default in ((f.name, f.default) for f in fields(RunConfig)):
        raw = values.get(key, default)
        if isinstance(default, int) and not isinstance(raw, int):
            try:
                raw = int(str(raw), 10)
            except ValueError as exc:
                raise InvalidSpec(f"config key {key!r} needs an integer") from exc
        merged[key] = raw
    cfg = RunConfig(**merged)
    if cfg.backend not in ("exact", "float"):
        raise InvalidSpec("backend must be 'exact' or 'float'")
    if cfg.prec < 8:
        raise InvalidSpec("precision below 8 bits is not meaningful")
    for key in ("max_steps", "truncation_depth", "workers", "seed"):
        if getattr(cfg, key) < 0:
            raise InvalidSpec(f"{key} must be >= 0")
    return cfg


def _config_hash(cfg: RunConfig) -> str:
    blob = "\n".join(f"{k}={getattr(cfg, k)}" for k in _HASH_FIELDS)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _ctx(cfg: RunConfig) -> Context:
    return Context(cfg.backend, cfg.prec)


def _max_steps(cfg: RunConfig):
    return cfg.max_steps if cfg.max_steps > 0 else None


def _workers(cfg: RunConfig, jobs: int) -> int:
    w = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    return max(1, min(w, jobs))


# -- scalar and vector serialization ----------------------------------------


def _cell(x, ctx: Context) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, Fraction)):
        return str(x)
    return ctx.to_str(x)


def _coord_strs(v) -> tuple:
    return tuple(_cell(c, v.ctx) for c in v.coords)


def _parse_ample(text: str, n: int, ctx: Context):
    """'u', '<k>u', or a comma list of coordinates."""
    text = (text or "u").strip()
    if text.endswith("u"):
        mult = text[:-1].strip() or "1"
        return u_vector(n, ctx).scale(ctx.make(mult))
    parts = [p.strip() for p in text.split(",")]
    return vector(n, parts, ctx)


def _format_word(word: Word) -> str:
    if word.length <= 64:
        return "[" + ", ".join(str(i) for i in word.to_indices()) + "]"
    parts = []
    for letters, count in word.segments:
        body = ",".join(str(l) for l in letters)
        parts.append(f"({body})^{count}")
    return f"length {word.length}: " + " ".join(parts)


# -- boundary point spec JSON ------------------------------------------------


def _rational(raw) -> Fraction:
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(f"not a rational/decimal string: {raw!r}") from exc


def spec_from_obj(data, ctx: Context) -> BoundaryPointSpec:
    """Parse the point-spec JSON object.

    Schema: {"n": int, "word": [int], "divergent": {index: coeff-string},
    "recurrent": null | {"type": "explicit", "support": [int],
    "coords": [string]} | {"type": "schedule", "support": [int],
    "steps": [[i, j, k-string]]}}.  All scalars are decimal or p/q strings.
    """
    if not isinstance(data, dict) or "n" not in data:
        raise InvalidSpec("spec JSON must be an object with an 'n' field")
    n = int(data["n"])
    word = [int(i) for i in (data.get("word") or ())]
    divergent = {
        int(key): _rational(val)
        for key, val in (data.get("divergent") or {}).items()
    }
    rec_obj = data.get("recurrent")
    recurrent = None
    if rec_obj is not None:
        kind = rec_obj.get("type")
        support = tuple(int(t) for t in rec_obj.get("support", ()))
        if kind == "explicit":
            coords = [str(c) for c in rec_obj["coords"]]
            recurrent = ExplicitIsotropic(vector(n, coords, ctx), support)
        elif kind == "schedule":
            steps = tuple(
                (CuspId(int(i), int(j)), int(str(k)))
                for i, j, k in rec_obj["steps"]
            )
            recurrent = ExcursionSchedule(n, steps, support)
        else:
            raise InvalidSpec(f"unknown recurrent type {kind!r}")
    return BoundaryPointSpec(
        n=n, word=word, divergent=divergent, recurrent=recurrent
    )


def spec_to_obj(spec: BoundaryPointSpec, ctx: Context, extra=None) -> dict:
    obj = {"n": spec.n, "word": list(spec.word.to_indices())}
    if spec.divergent:
        obj["divergent"] = {
            str(t): _cell(c, ctx) for t, c in spec.divergent
        }
    rec = spec.recurrent
    if isinstance(rec, ExplicitIsotropic):
        obj["recurrent"] = {
            "type": "explicit",
            "support": list(rec.support),
            "coords": list(_coord_strs(rec.vector)),
        }
    elif isinstance(rec, ExcursionSchedule):
        obj["recurrent"] = {
            "type": "schedule",
            "support": list(rec.support),
            "steps": [[c.i, c.j, str(k)] for c, k in rec.steps],
        }
    if extra:
        obj.update(extra)
    return obj


def load_spec_file(path: str, ctx: Context) -> BoundaryPointSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidSpec(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"spec file {path} is not valid JSON: {exc}") from exc
    return spec_from_obj(data, ctx)


def certificate_to_obj(cert) -> dict:
    to_str = lambda x: mpmath.nstr(
        mpmath.mpf(x.numerator) / x.denominator
        if isinstance(x, Fraction)
        else mpmath.mpf(x),
        12,
    )
    return {
        "depths": list(cert.depths),
        "increments": [to_str(x) for x in cert.increments],
        "rate": None if cert.rate is None else to_str(cert.rate),
        "normalization": cert.normalization,
    }


# -- table emission ----------------------------------------------------------


def _emit_table(cfg, cfg_hash, meta, columns, rows, stream=None):
    close = False
    if stream is None:
        if cfg.out:
            stream = open(cfg.out, "w", encoding="utf-8", newline="")
            close = True
        else:
            stream = sys.stdout
    try:
        if cfg.format == "json":
            doc = {
                "tool": f"wehler {__version__}",
                "config": cfg_hash,
                "run_config": {
                    k: getattr(cfg, k) for k in _HASH_FIELDS
                },
                "metadata": {k: str(v) for k, v in sorted(meta.items())},
                "columns": list(columns),
                "rows": [list(r) for r in rows],
            }
            json.dump(doc, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            stream.write(f"# wehler {__version__}\n")
            stream.write(f"# config: {cfg_hash}\n")
            for k in _HASH_FIELDS:
                stream.write(f"# cfg.{k}: {getattr(cfg, k)}\n")
            for k, v in sorted(meta.items()):
                stream.write(f"# {k}: {v}\n")
            stream.write(",".join(columns) + "\n")
            for row in rows:
                stream.write(",".join(_csv_escape(c) for c in row) + "\n")
    finally:
        if close:
            stream.close()


def _csv_escape(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def _run_jobs(worker, payloads, workers: int):
    if workers <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    chunk = max(1, len(payloads) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, payloads, chunksize=chunk))


# -- per-row workers (top level for pickling) --------------------------------


def _grid_s_str(ctx: Context, base: int, q: int) -> str:
    with ctx.work():
        if ctx.is_exact:
            s = ctx.make(Fraction(1, base**q) if q >= 0 else base ** (-q))
        else:
            s = ctx.make(base) ** ctx.make(-q)
        return _cell(s, ctx)


def _ray_cell(p) -> list:
    ctx = Context(p["backend"], p["prec"])
    d = vector(p["n"], p["d"], ctx)
    a = vector(p["n"], p["a"], ctx)
    try:
        table = asymptotics.ray_scan(
            d, a, [p["q"]], base=p["base"], ctx=ctx, max_steps=p["max_steps"]
        )
        r = table.rows[0]
        return [
            _cell(r.s, ctx),
            _cell(r.t, ctx),
            _cell(r.vol, ctx),
            _cell(r.log_vol_over_log_s, ctx),
            _cell(r.phi, ctx),
            str(r.word_length),
            _cell(r.clamped, ctx),
            "",  # fitted_slope, filled in by the parent
            "",
        ]
    except WehlerError as exc:
        s_str = _grid_s_str(ctx, p["base"], p["q"])
        return [s_str, "", "", "", "", "", "", "", str(exc)]


def _h0_cell(p) -> list:
    ctx = Context(p["backend"], p["prec"])
    d = vector(p["n"], p["d"], ctx)
    a = vector(p["n"], p["a"], ctx)
    m = p["m"]
    try:
        table = asymptotics.h0_scan(
            d, a, [m], ctx=ctx, max_steps=p["max_steps"]
        )
        if not table.rows:
            reason = (
                table.metadata["skipped"][0][1]
                if table.metadata.get("skipped")
                else "row skipped"
            )
            return [str(m), "", "", "", "", "", reason]
        r = table.rows[0]
        return [
            str(r.m),
            str(r.h0),
            _cell(r.log_h0_over_log_m, ctx),
            str(r.word_length),
            _cell(r.lower, ctx),
            _cell(r.upper, ctx),
            "",
        ]
    except WehlerError as exc:
        return [str(m), "", "", "", "", "", str(exc)]


def _figure_cell(p) -> list:
    ctx = Context(p["backend"], p["prec"])
    d = vector(p["n"], p["d"], ctx)
    a = vector(p["n"], p["a"], ctx)
    try:
        table = asymptotics.ray_scan(
            d, a, [p["q"]], base=p["base"], ctx=ctx, max_steps=p["max_steps"]
        )
        r = table.rows[0]
        return [p["t"], _cell(r.s, ctx), _cell(r.vol, ctx), ""]
    except WehlerError as exc:
        s_str = _grid_s_str(ctx, p["base"], p["q"])
        return [p["t"], s_str, "", str(exc)]


# -- derived columns and estimate output --------------------------------------


def _scan_scalar(text: str, prec: int):
    if "/" in text:
        fr = Fraction(text)
        return mpmath.mpf(fr.numerator) / fr.denominator
    return mpmath.mpf(text)


def _fill_fitted_slopes(rows, prec: int):
    """Prefix least-squares slope of log vol against log s, one value per
    successful row once two points are available."""
    xs, ys = [], []
    with mpmath.workprec(prec):
        for row in rows:
            if row[-1]:  # error rows keep an empty slope cell
                continue
            xs.append(mpmath.log(_scan_scalar(row[0], prec)))
            ys.append(mpmath.log(_scan_scalar(row[2], prec)))
            if len(xs) >= 2:
                slope = asymptotics._lsq_slope(xs, ys)
                row[-2] = mpmath.nstr(slope, 12)


def _table_from_ray_rows(rows, ctx: Context, n: int):
    parsed = []
    for row in rows:
        if row[-1]:
            continue
        parsed.append(
            asymptotics.RayScanRow(
                s=ctx.make(row[0]),
                t=ctx.make(row[1]),
                vol=ctx.make(row[2]),
                log_vol_over_log_s=ctx.make(row[3]),
                phi=ctx.make(row[4]) if row[4] else None,
                word_length=int(row[5]),
                clamped=row[6] == "true",
            )
        )
    return asymptotics.RayScanTable(
        tuple(parsed), {"n": n, "backend": ctx.backend, "precision": ctx.prec}
    )


def _print_estimate_json(est: dict, ctx: Context):
    out = {}
    for key, val in est.items():
        if isinstance(val, (bool, int, str)) or val is None:
            out[key] = val
        elif isinstance(val, tuple):
            out[key] = [
                v if isinstance(v, int) else mpmath.nstr(_scan_scalar(_cell(v, ctx), 64), 12)
                for v in val
            ]
        else:
            with mpmath.workprec(ctx.prec):
                out[key] = mpmath.nstr(_scan_scalar(_cell(val, ctx), ctx.prec), 12)
    print(json.dumps(out, indent=2, sort_keys=True))


# -- commands -----------------------------------------------------------------


def cmd_reduce(args, cfg: RunConfig) -> int:
    ctx = _ctx(cfg)
    parts = [p.strip() for p in args.coords.split(",")]
    v = vector(cfg.n, parts, ctx)
    if cfg.max_steps > 0:
        res = reduce_to_chamber(v, max_steps=cfg.max_steps)
    else:
        res = reduce_to_chamber(v)
    print("reduced:", ",".join(_coord_strs(res.reduced)))
    print("word:", _format_word(res.word))
    print("steps:", res.steps)
    print("clamped:", "true" if res.clamped else "false")
    return 0


def cmd_ray_scan(args, cfg: RunConfig) -> int:
    ctx = _ctx(cfg)
    spec = load_spec_file(args.spec, ctx)
    depth = cfg.truncation_depth if cfg.truncation_depth > 0 else None
    d_vec, cert = materialize_with_certificate(spec, ctx, depth)
    n = d_vec.n
    # canonical string transport: serial and parallel paths see identical
    # inputs, so worker count cannot change the output bytes
    d_strs = _coord_strs(d_vec)
    a_vec = _parse_ample(args.a, n, ctx)
    a_strs = _coord_strs(a_vec)
    qs = list(range(cfg.q_min, cfg.q_max + 1))
    payloads = [
        {
            "backend": cfg.backend,
            "prec": cfg.prec,
            "n": n,
            "d": d_strs,
            "a": a_strs,
            "q": q,
            "base": cfg.base,
            "max_steps": _max_steps(cfg),
        }
        for q in qs
    ]
    rows = _run_jobs(_ray_cell, payloads, _workers(cfg, len(payloads)))
    _fill_fitted_slopes(rows, cfg.prec)
    meta = {
        "command": "ray-scan",
        "n": n,
        "d": asymptotics.describe_spec(spec),
        "a": ",".join(a_strs),
        "grid": f"s = {cfg.base}^-q, q in {cfg.q_min}..{cfg.q_max}"
        if qs
        else "empty",
        "truncation_certificate": ""
        if cert.final_increment is None
        else _cell(cert.final_increment, ctx),
    }
    _emit_table(cfg, _config_hash(cfg), meta, RAY_COLUMNS, rows)
    if args.estimates:
        table = _table_from_ray_rows(rows, ctx, n)
        est = asymptotics.slope_estimates(table, cfg.window)
        est["nu_vol"] = asymptotics.nu_vol_estimate(table, cfg.window)
        _print_estimate_json(est, ctx)
    return 0


def _m_grid(cfg: RunConfig, designated=()):
    ms = set()
    for q in range(0, cfg.m_exp_max + 1):
        val = cfg.base**q
        ms.add(int(val))
    cap = cfg.base**cfg.m_exp_max
    for m in designated:
        if m <= cap:
            ms.add(int(m))
    return sorted(ms)


def cmd_h0_scan(args, cfg: RunConfig) -> int:
    ctx = _ctx(cfg)
    spec = load_spec_file(args.spec, ctx)
    depth = cfg.truncation_depth if cfg.truncation_depth > 0 else None
    d_vec, _ = materialize_with_certificate(spec, ctx, depth)
    n = d_vec.n
    d_strs = _coord_strs(d_vec)
    a_vec = _parse_ample(args.a, n, ctx)
    a_strs = _coord_strs(a_vec)
    designation = None
    if args.include_designated or args.kappa:
        if not isinstance(spec.recurrent, ExcursionSchedule):
            raise InvalidSpec(
                "designated subsequences need a schedule-type recurrent part"
            )
        with mpmath.workprec(64):
            horizon = mpmath.log(mpmath.mpf(cfg.base) ** cfg.m_exp_max) / 2
        designation = asymptotics.designated_subsequences(
            spec.recurrent, horizon, prec=cfg.prec
        )
    designated_ms = []
    if designation is not None and args.include_designated:
        designated_ms = list(designation.hills_m) + list(designation.valleys_m)
    ms = _m_grid(cfg, designated_ms)
    payloads = [
        {
            "backend": cfg.backend,
            "prec": cfg.prec,
            "n": n,
            "d": d_strs,
            "a": a_strs,
            "m": m,
            "max_steps": _max_steps(cfg),
        }
        for m in ms
    ]
    rows = _run_jobs(_h0_cell, payloads, _workers(cfg, len(payloads)))
    meta = {
        "command": "h0-scan",
        "n": n,
        "d": asymptotics.describe_spec(spec),
        "a": ",".join(a_strs),
        "grid": f"m = {cfg.base}^q, q in 0..{cfg.m_exp_max}"
        + (", plus designated subsequences" if designated_ms else ""),
    }
    _emit_table(cfg, _config_hash(cfg), meta, H0_COLUMNS, rows)
    if args.kappa:
        parsed = []
        for row in rows:
            if row[-1] or not row[1]:
                continue
            parsed.append(
                asymptotics.SectionScanRow(
                    m=int(row[0]),
                    h0=int(row[1]),
                    log_h0_over_log_m=ctx.make(row[2]) if row[2] else None,
                    word_length=int(row[3]),
                    lower=ctx.make(row[4]),
                    upper=ctx.make(row[5]),
                )
            )
        table = asymptotics.SectionScanTable(
            tuple(parsed), {"n": n, "precision": ctx.prec}
        )
        est = asymptotics.kappa_estimates(table, designation)
        _print_estimate_json(est, ctx)
    return 0


def _solve_length_ratio(target: Fraction, n: int):
    """Invert delta_inf_target(L, n) = target by bisection; the map is
    strictly decreasing in L on (1, inf).  Snaps to a nearby small rational
    when the solved value is within 1e-9 of one."""
    with mpmath.workprec(128):
        tgt = mpmath.mpf(target.numerator) / target.denominator
        lo = mpmath.mpf(1) + mpmath.mpf(2) ** -40
        hi = mpmath.mpf(2)
        while delta_inf_target(hi, n) > tgt:
            hi *= 2
            if hi > 2**64:
                raise InvalidSpec("delta target too close to 1 for bisection")
        for _ in range(200):
            mid = (lo + hi) / 2
            if delta_inf_target(mid, n) > tgt:
                lo = mid
            else:
                hi = mid
            if hi - lo < mpmath.mpf(2) ** -100:
                break
        solved = (lo + hi) / 2
        snapped = Fraction(float(solved)).limit_denominator(1000)
        if snapped > 1 and abs(mpmath.mpf(snapped.numerator) / snapped.denominator - solved) < mpmath.mpf("1e-9"):
            return snapped
        return float(solved)


def cmd_construct(args, cfg: RunConfig) -> int:
    n = cfg.n
    support = None
    if args.support:
        support = tuple(int(t) for t in args.support.split(","))
    generator = {}
    if args.L is not None:
        L = _rational(args.L)
        count = args.count or 6
        schedule = geometric_schedule(n, L, count, support)
        generator = {"kind": "geometric", "L": str(L), "count": count}
    elif args.delta_target is not None:
        raw = args.delta_target.strip()
        target = Fraction(n, 2) if raw in ("N/2", "n/2") else _rational(raw)
        if not 1 <= target <= Fraction(n, 2):
            raise InvalidSpec(
                f"delta target {target} outside [1, N/2] = [1, {Fraction(n, 2)}]"
            )
        if target == 1:
            count = args.count or 4
            schedule = supergeometric_schedule(n, count, support)
            generator = {"kind": "supergeometric", "count": count}
        elif target == Fraction(n, 2):
            count = args.count or 3
            schedule = polynomial_schedule(n, count, support=support)
            generator = {"kind": "polynomial", "power": 10, "count": count}
        else:
            L = _solve_length_ratio(target, n)
            count = args.count or 6
            schedule = geometric_schedule(n, L, count, support)
            generator = {
                "kind": "geometric",
                "L": str(L),
                "count": count,
                "delta_target": str(target),
            }
    else:
        raise InvalidSpec("construct needs --L or --delta-target")
    ctx = Context("float", cfg.prec)
    depth = cfg.truncation_depth if cfg.truncation_depth > 0 else None
    _, cert = schedule_limit_vector(schedule, depth, ctx)
    spec = BoundaryPointSpec(
        n=n, word=(), divergent={}, recurrent=schedule
    )
    obj = spec_to_obj(spec, ctx, extra={"generator": generator})
    cert_obj = certificate_to_obj(cert)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.certificate:
        with open(args.certificate, "w", encoding="utf-8") as fh:
            json.dump(cert_obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not cfg.out:
        print(
            json.dumps(
                {"spec": obj, "certificate": cert_obj},
                indent=2,
                sort_keys=True,
            )
        )
    return 0


def cmd_figure1(args, cfg: RunConfig) -> int:
    if cfg.backend != "float":
        raise InvalidSpec("the figure grid needs the float backend")
    if cfg.n < 3:
        raise InvalidSpec("the boundary arc needs n >= 3")
    ctx = _ctx(cfg)
    n = cfg.n
    p0 = omega_hat(n, 0, 1, ctx)
    a_vec = u_vector(n, ctx)
    a_strs = _coord_strs(a_vec)
    den = cfg.t_count - 1
    if den < 1:
        raise InvalidSpec("t grid needs at least 2 points")
    payloads = []
    for i in range(cfg.t_count):
        tt = Fraction(i, den)
        d_t = cusp_triangle_arc(n, tt, ctx)
        d_strs = _coord_strs(d_t)
        t_str = repr(float(tt))
        for q in range(cfg.q_min, cfg.q_max + 1):
            payloads.append(
                {
                    "backend": cfg.backend,
                    "prec": cfg.prec,
                    "n": n,
                    "d": d_strs,
                    "a": a_strs,
                    "q": q,
                    "base": cfg.base,
                    "max_steps": _max_steps(cfg),
                    "t": t_str,
                }
            )
    rows = _run_jobs(_figure_cell, payloads, _workers(cfg, len(payloads)))
    with ctx.work():
        slice_level = _cell(pair_with_u(p0), ctx)
    meta = {
        "command": "figure1",
        "n": n,
        "a": ",".join(a_strs),
        "curve": (
            "isotropic conic through omega_hat(0,1), omega_hat(0,2), "
            f"omega_hat(1,2) on the slice <v,u> = {slice_level}; rational t "
            "are wall-crossing translates of cusp rays"
        ),
        "grid": f"t = i/{den}, i in 0..{den}; s = {cfg.base}^-q, "
        f"q in {cfg.q_min}..{cfg.q_max}",
    }
    _emit_table(cfg, _config_hash(cfg), meta, FIGURE_COLUMNS, rows)
    return 0


# -- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidSpec(message)


def _add_common(sp):
    sp.add_argument("--config", help="INI config path (or WEHLER_CONFIG)")
    sp.add_argument("--backend", choices=("exact", "float"))
    sp.add_argument("--prec", type=int, help="float mantissa bits")
    sp.add_argument("--max-steps", type=int, dest="max_steps")
    sp.add_argument("--workers", type=int, help="parallel row workers")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"))


def _build_parser() -> _Parser:
    p = _Parser(
        prog="wehler",
        description="Volume and section-count scans on the (1,n) lattice",
    )
    sub = p.add_subparsers(dest="command")

    sp = sub.add_parser("reduce", help="reduce a class into the nef chamber")
    _add_common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("coords", help="comma-separated coordinates")
    # rational inputs stay rational unless a backend is requested
    sp.set_defaults(func=cmd_reduce, cmd_defaults={"backend": "exact"})

    sp = sub.add_parser("ray-scan", help="volume scan along s*A + D")
    _add_common(sp)
    sp.add_argument("--spec", required=True, help="boundary point JSON file")
    sp.add_argument("--a", default="u", help="ample class: u, <k>u, or coords")
    sp.add_argument("--q-min", type=int, dest="q_min")
    sp.add_argument("--q-max", type=int, dest="q_max")
    sp.add_argument("--base", type=int)
    sp.add_argument("--window", type=int)
    sp.add_argument(
        "--truncation-depth", type=int, dest="truncation_depth"
    )
    sp.add_argument(
        "--estimates",
        action="store_true",
        help="print slope/exponent estimates as JSON after the table",
    )
    sp.set_defaults(func=cmd_ray_scan)

    sp = sub.add_parser("h0-scan", help="section-count scan of round(mD)+A")
    _add_common(sp)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--a", default="2u")
    sp.add_argument("--base", type=int)
    sp.add_argument("--m-exp-max", type=int, dest="m_exp_max")
    sp.add_argument(
        "--truncation-depth", type=int, dest="truncation_depth"
    )
    sp.add_argument(
        "--include-designated",
        action="store_true",
        help="add the schedule's hill/valley m values to the grid",
    )
    sp.add_argument(
        "--kappa",
        action="store_true",
        help="print kappa estimates over the designated subsequences",
    )
    sp.set_defaults(func=cmd_h0_scan)

    sp = sub.add_parser(
        "construct", help="build a recurrent boundary point spec"
    )
    _add_common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--L", help="length ratio (> 1)")
    sp.add_argument(
        "--delta-target",
        dest="delta_target",
        help="liminf volume exponent in [1, N/2]; accepts 'N/2'",
    )
    sp.add_argument("--count", type=int, help="number of excursions")
    sp.add_argument("--support", help="comma list of cusp support indices")
    sp.add_argument(
        "--truncation-depth", type=int, dest="truncation_depth"
    )
    sp.add_argument("--certificate", help="write the certificate JSON here")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser(
        "figure1", help="volume surface grid over the boundary arc"
    )
    _add_common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--t-count", type=int, dest="t_count")
    sp.add_argument("--q-min", type=int, dest="q_min")
    sp.add_argument("--q-max", type=int, dest="q_max")
    sp.add_argument("--base", type=int)
    sp.set_defaults(func=cmd_figure1)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 1
    cfg = _load_config(args)
    return args.func(args, cfg)


def entry(argv=None) -> int:
    try:
        return main(argv)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WehlerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(entry())
