"""Parameter sweeps, oracle comparisons and their serialisation.

A :class:`SweepSpec` describes one grid over a single variable. The same
dictionary layout is used for config files and for the ``meta.spec`` entry
of JSON output, so any JSON output can be fed back as a config.

Records are flat dictionaries with a fixed column set per spec, ready to be
written as CSV rows or JSON objects.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import io
import json
import math
import os
import re
import time
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import CCAError, InvalidSpecError, NumericalError
from .green import dos_1d, sigma_l_analytic, sigma_total
from .lattice import (EVANESCENT, LayerSpec, ModelParams, Momentum2, channel_cosine,
                      classify_cosine, fold_momentum)
from .oracle.packet import WavePacketSpec, evolve_wavepacket
from .oracle.strip import flux_probabilities, solve_strip_exact
from .scatter1 import FLUX_FACTOR, r_one
from .scatter2 import MODES, r_two

__all__ = [
    "SWEEP_MODES",
    "VARIABLES",
    "TOTAL_TOL",
    "RATIO_TOL",
    "PACKET_TOL",
    "SweepSpec",
    "parse_angle",
    "grid",
    "evaluate_point",
    "run_sweep",
    "compare_oracles",
    "format_csv",
    "format_json",
    "write_output",
]

SWEEP_MODES = ("delta-sweep", "kx-sweep", "xdist-sweep", "oracle-compare", "selfenergy", "dos")

#: Variables each mode may sweep.
VARIABLES = {
    "delta-sweep": ("delta",),
    "kx-sweep": ("kx", "coskx"),
    "xdist-sweep": ("xdist",),
    "oracle-compare": ("delta", "kx", "coskx"),
    "selfenergy": ("kx", "coskx", "ky"),
    "dos": ("energy",),
}

#: Agreement required between an ``R_II`` mode and the strip-solver total.
TOTAL_TOL = 1e-6
#: Agreement required between closed-form and strip channel ratios.
RATIO_TOL = 1e-8
#: Relative agreement required between packet and strip probabilities.
PACKET_TOL = 0.02

_ANGLE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")


def parse_angle(value) -> float:
    """Parse a number or a multiple of pi such as ``"pi/8"``, ``"-3pi/4"``, ``"2*pi/3"``.

    Raises
    ------
    InvalidSpecError
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().lower().replace(" ", "")
    m = _ANGLE.match(text)
    try:
        if m:
            sign, num, den = m.groups()
            frac = Fraction(num or 1) / Fraction(den or 1)
            out = frac.numerator * math.pi / frac.denominator
            return -out if sign == "-" else out
        out = float(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidSpecError(f"cannot parse {value!r} as a number or multiple of pi") from None
    if not math.isfinite(out):
        raise InvalidSpecError(f"{value!r} is not a finite number")
    return out


def _parse_complex(value, name):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return complex(float(value["re"]), float(value["im"]))
    try:
        return complex(str(value).replace(" ", ""))
    except ValueError:
        raise InvalidSpecError(f"{name}: cannot parse {value!r} as a coupling") from None


def _dump_complex(z: complex):
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep over a single variable.

    Parameters
    ----------
    mode : str
        One of :data:`SWEEP_MODES`.
    params : ModelParams
        Base parameters; the swept variable overrides one of them.
    var : str
        Swept variable, one of ``VARIABLES[mode]``. ``coskx`` sweeps
        ``cos kx`` (with ``kx`` in (0, pi)); ``xdist`` sweeps the integer
        layer separation ``x2 - x1``; ``energy`` is the DOS energy.
    start, stop : float
    count : int
        Grid ``linspace(start, stop, count)``, ``count >= 2``.
    kx, ky : float
        Incident momentum (for ``energy`` sweeps only ``ky`` is used).
    r_mode : str
        ``R_II`` counting for two-layer sweeps, see :func:`~ccaphoton.scatter2.r_two`.
    packet : bool
        Include a time-domain run in ``oracle-compare``.
    lx : int
        Lattice length of that run.
    out : str, optional
    format : str
        ``"csv"`` or ``"json"``.
    """

    mode: str
    params: ModelParams
    var: str
    start: float
    stop: float
    count: int
    kx: float = math.pi / 8
    ky: float = math.pi / 4
    r_mode: str = "paper"
    packet: bool = False
    lx: int = 2048
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.mode not in SWEEP_MODES:
            raise InvalidSpecError(f"mode: expected one of {SWEEP_MODES}, got {self.mode!r}")
        if self.var not in VARIABLES[self.mode]:
            raise InvalidSpecError(
                f"var: mode {self.mode!r} sweeps one of {VARIABLES[self.mode]}, got {self.var!r}")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 2:
            raise InvalidSpecError(f"count: expected an integer >= 2, got {self.count!r}")
        for name in ("start", "stop", "kx", "ky"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpecError(f"{name}: must be finite, got {getattr(self, name)!r}")
        if self.r_mode not in MODES:
            raise InvalidSpecError(f"r_mode: expected one of {MODES}, got {self.r_mode!r}")
        if self.format not in ("csv", "json"):
            raise InvalidSpecError(f"format: expected 'csv' or 'json', got {self.format!r}")
        if self.var == "coskx" and not (-1 < self.start < 1 and -1 < self.stop < 1):
            raise InvalidSpecError("start/stop: cos kx must lie strictly inside (-1, 1)")
        if self.mode == "xdist-sweep":
            if len(self.params.layers) != 2:
                raise InvalidSpecError("params.layers: xdist-sweep needs two layers")
            step = (self.stop - self.start) / (self.count - 1)
            if any(v != round(v) for v in (self.start, self.stop, step)):
                raise InvalidSpecError("start/stop/count: xdist grid must consist of integers")
        if self.lx < 64:
            raise InvalidSpecError(f"lx: expected at least 64, got {self.lx!r}")

    # --- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        p = self.params
        out = {k: v for k, v in asdict(self).items() if k != "params"}
        out["params"] = {
            "xi": p.xi, "delta": p.delta, "d": p.d,
            "layers": [{"x": layer.x, "omega": _dump_complex(layer.omega)} for layer in p.layers],
        }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        """Build a spec from a config dictionary or from a full JSON output ``{meta, records}``."""
        if not isinstance(data, dict):
            raise InvalidSpecError("config: top level must be an object")
        if isinstance(data.get("meta"), dict) and "spec" in data["meta"]:
            data = data["meta"]["spec"]
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidSpecError(f"config: unknown field(s) {sorted(unknown)}")
        missing = {"mode", "var", "start", "stop", "count"} - set(data)
        if missing:
            raise InvalidSpecError(f"config: missing field(s) {sorted(missing)}")
        kw = dict(data)
        kw["params"] = params_from_dict(data.get("params", {}))
        for name in ("start", "stop", "kx", "ky"):
            if name in kw:
                kw[name] = _field(name, parse_angle, kw[name])
        kw["count"] = _field("count", _strict_int, kw["count"])
        if "lx" in kw:
            kw["lx"] = _field("lx", _strict_int, kw["lx"])
        if "packet" in kw and not isinstance(kw["packet"], bool):
            raise InvalidSpecError(f"packet: expected true/false, got {kw['packet']!r}")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InvalidSpecError(f"config: cannot read {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidSpecError(f"config {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)


def _strict_int(v):
    if isinstance(v, bool) or float(v) != int(float(v)):
        raise ValueError(v)
    return int(float(v))


def _field(name, conv, value):
    try:
        return conv(value)
    except InvalidSpecError as exc:
        raise InvalidSpecError(f"{name}: {exc}") from None
    except (TypeError, ValueError):
        raise InvalidSpecError(f"{name}: invalid value {value!r}") from None


def params_from_dict(data: dict) -> ModelParams:
    if not isinstance(data, dict):
        raise InvalidSpecError("params: expected an object")
    unknown = set(data) - {"xi", "delta", "d", "layers"}
    if unknown:
        raise InvalidSpecError(f"params: unknown field(s) {sorted(unknown)}")
    layers = data.get("layers", [{"x": 0, "omega": 5.0}])
    if not isinstance(layers, list) or not 1 <= len(layers) <= 2:
        raise InvalidSpecError("params.layers: expected a list of one or two layers")
    specs = []
    for i, layer in enumerate(layers):
        if not isinstance(layer, dict) or set(layer) - {"x", "omega"}:
            raise InvalidSpecError(f"params.layers[{i}]: expected an object with 'x' and 'omega'")
        x = _field(f"params.layers[{i}].x", _strict_int, layer.get("x", 0))
        specs.append(LayerSpec(x, _parse_complex(layer.get("omega", 0.0), f"params.layers[{i}].omega")))
    try:
        return ModelParams(xi=_field("params.xi", float, data.get("xi", 1.0)),
                           delta=_field("params.delta", float, data.get("delta", 0.0)),
                           d=_field("params.d", _strict_int, data.get("d", 1)),
                           layers=tuple(specs))
    except InvalidSpecError:
        raise
    except ValueError as exc:
        raise InvalidSpecError(f"params: {exc}") from None


def grid(spec: SweepSpec) -> np.ndarray:
    values = np.linspace(spec.start, spec.stop, spec.count)
    if spec.var == "xdist":
        values = np.rint(values)
    return values


# --- per-point evaluation ------------------------------------------------------

def _point_setup(spec: SweepSpec, value):
    """``(k, params)`` at one grid value."""
    p = spec.params
    kx, ky = spec.kx, spec.ky
    if spec.var == "delta":
        p = p.with_delta(value)
    elif spec.var == "kx":
        kx = value
    elif spec.var == "coskx":
        kx = math.acos(value)
    elif spec.var == "ky":
        ky = value
    elif spec.var == "xdist":
        a, b = p.layers
        p = replace(p, layers=(a, LayerSpec(a.x + int(value), b.omega)))
    return Momentum2(kx, ky), p


def _channel_range(d):
    return range(-(d - 1), d)


def _columns(spec: SweepSpec) -> list[str]:
    d = spec.params.d
    two = len(spec.params.layers) == 2
    cols = [spec.var]
    if spec.mode in ("delta-sweep", "kx-sweep", "xdist-sweep"):
        cols += ["status", "R"] + [f"P_{l}" for l in _channel_range(d)]
        if two:
            cols += ["re_sigma_plus", "im_sigma_plus", "re_sigma_minus", "im_sigma_minus",
                     "delta_plus", "delta_minus"]
        else:
            cols += ["re_sigma", "im_sigma"]
        cols += ["divergent"]
    elif spec.mode == "selfenergy":
        cols += ["status"]
        for l in range(d):
            cols += [f"A_{l}", f"re_sigma_{l}", f"im_sigma_{l}"]
        cols += ["re_sigma", "im_sigma", "divergent"]
    elif spec.mode == "dos":
        cols += ["status"]
        for l in range(d):
            cols += [f"rho_{l}", f"edge_{l}"]
    else:
        cols += ["status", "R_closed"]
        if two:
            cols += [f"R_{m}" for m in MODES]
        cols += ["R_strip", "strip_unitarity", "max_ratio_delta", "ratio_pass"]
        if two:
            cols += [f"match_{m}" for m in MODES]
        if spec.packet:
            cols += ["packet_max_delta", "packet_norm_drift", "packet_pass", "packet_inconclusive"]
    return cols


def _scatter_record(spec, value, k, p):
    d = p.d
    rec = {}
    if len(p.layers) == 2:
        res = r_two(k, p, spec.r_mode)
        if res.divergent:
            rec.update(re_sigma_plus=None, im_sigma_plus=None, re_sigma_minus=None,
                       im_sigma_minus=None, delta_plus=None, delta_minus=None)
        else:
            sp, sm = res.sigma_pm
            base = 2.0 * p.xi * (math.cos(k.kx) + math.cos(k.ky))
            rec.update(re_sigma_plus=sp.real, im_sigma_plus=sp.imag,
                       re_sigma_minus=sm.real, im_sigma_minus=sm.imag,
                       delta_plus=base + sp.real, delta_minus=base + sm.real)
    else:
        res = r_one(k, p)
        rec.update(re_sigma=None if res.divergent else res.lamb_shift,
                   im_sigma=None if res.divergent else -res.linewidth)
    probs = {ch.l: pr for ch, pr in res.channels}
    rec["R"] = res.total
    for l in _channel_range(d):
        rec[f"P_{l}"] = probs.get(l, 0.0)
    rec["divergent"] = res.divergent
    return rec


def _selfenergy_record(spec, value, k, p):
    rec = {}
    sig = sigma_total(k, p)
    for l in range(p.d):
        rec[f"A_{l}"] = channel_cosine(k, l, p.d)
        s = sigma_l_analytic(k, l, p)
        rec[f"re_sigma_{l}"] = None if s is None else s.real
        rec[f"im_sigma_{l}"] = None if s is None else s.imag
    rec["re_sigma"] = None if sig.divergent else sig.value.real
    rec["im_sigma"] = None if sig.divergent else sig.value.imag
    rec["divergent"] = sig.divergent
    return rec


def _dos_record(spec, value, k, p):
    rec = {}
    for l in range(p.d):
        ky_out = float(fold_momentum(spec.ky, l, p.d))
        c = -value / (2.0 * p.xi) - math.cos(ky_out)
        if classify_cosine(c) == EVANESCENT:
            rec[f"rho_{l}"], rec[f"edge_{l}"] = 0.0, False
            continue
        pt = dos_1d(value, ky_out, p)
        rec[f"rho_{l}"], rec[f"edge_{l}"] = pt.rho, pt.band_edge
    return rec


def _analytic_packets(k, p):
    """Closed-form probabilities keyed like the strip solver, ``(l >= 0, direction)``.

    Two layers use the directional counting, the only one that assigns a
    probability to each individual packet.
    """
    res = r_two(k, p, "directional") if len(p.layers) == 2 else r_one(k, p)
    out = {}
    for ch, pr in res.channels:
        if not ch.is_open:
            continue
        out[(abs(ch.l), -1 if ch.l < 0 else 1)] = pr
    return out


def _compare_record(spec, value, k, p):
    rec = {}
    two = len(p.layers) == 2
    flux = flux_probabilities(solve_strip_exact(k, p))
    strip_r = flux.packet_total / FLUX_FACTOR
    if two:
        for m in MODES:
            rec[f"R_{m}"] = r_two(k, p, m).total
        rec["R_closed"] = rec[f"R_{spec.r_mode}"]
    else:
        rec["R_closed"] = r_one(k, p).total
    rec["R_strip"] = strip_r
    rec["strip_unitarity"] = flux.unitarity

    closed = _analytic_packets(k, p)
    ref = closed.get((0, 1), 0.0)
    sref = flux.scattered.get((0, 1), 0.0)
    worst = 0.0
    if ref > 0 and sref > 0:
        for key, pr in closed.items():
            worst = max(worst, abs(pr / ref - flux.scattered.get(key, 0.0) / sref))
    rec["max_ratio_delta"] = worst
    rec["ratio_pass"] = worst <= RATIO_TOL
    if two:
        for m in MODES:
            rec[f"match_{m}"] = abs(rec[f"R_{m}"] - strip_r) <= TOTAL_TOL
    if spec.packet:
        try:
            report = evolve_wavepacket(WavePacketSpec(k, lx=spec.lx), p, flux.scattered)
            rec["packet_max_delta"] = max(report.deltas.values(), default=0.0)
            rec["packet_norm_drift"] = report.norm_drift
            rec["packet_inconclusive"] = report.inconclusive
            rec["packet_pass"] = (rec["packet_max_delta"] <= PACKET_TOL
                                  and report.norm_drift <= 1e-8)
        except NumericalError as exc:
            rec.update(packet_max_delta=None, packet_norm_drift=None,
                       packet_inconclusive=True, packet_pass=False)
            rec["status"] = f"packet-error: {exc}"
    return rec


_EVALUATORS = {
    "delta-sweep": _scatter_record,
    "kx-sweep": _scatter_record,
    "xdist-sweep": _scatter_record,
    "selfenergy": _selfenergy_record,
    "dos": _dos_record,
    "oracle-compare": _compare_record,
}


def evaluate_point(spec: SweepSpec, value: float) -> dict:
    """One output record; per-point failures are reported in the ``status`` column."""
    cols = _columns(spec)
    rec = dict.fromkeys(cols)
    rec[spec.var] = float(value)
    rec["status"] = "ok"
    try:
        k, p = _point_setup(spec, float(value))
        rec.update(_EVALUATORS[spec.mode](spec, value, k, p))
    except (CCAError, ValueError) as exc:
        rec["status"] = f"{type(exc).__name__}: {exc}"
    if "divergent" in rec and rec["divergent"] and "R" in rec:
        rec["R"] = 0.0
    return {c: rec[c].item() if isinstance(rec[c], np.generic) else rec[c] for c in cols}


def _evaluate_chunk(args):
    spec, values = args
    return [evaluate_point(spec, v) for v in values]


def _records(spec: SweepSpec, jobs: int | None) -> list[dict]:
    values = list(grid(spec))
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, len(values)))
    if jobs == 1:
        return _evaluate_chunk((spec, values))
    chunks = [values[i::jobs] for i in range(jobs)]
    with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_evaluate_chunk, [(spec, c) for c in chunks]))
    # undo the round-robin split so records come out in grid order
    out = [None] * len(values)
    for i, part in enumerate(parts):
        out[i::jobs] = part
    return out


def run_sweep(spec: SweepSpec, jobs: int | None = None) -> dict:
    """Evaluate every grid point of ``spec``.

    Returns ``{"meta": {...}, "records": [...]}``. Records appear in grid
    order whatever the number of workers.
    """
    start = time.perf_counter()
    records = _records(spec, jobs)
    result = {"meta": _meta(spec, start), "records": records}
    if spec.mode == "oracle-compare":
        result["adjudication"] = _adjudicate(spec, records)
    return result


def compare_oracles(spec: SweepSpec, jobs: int | None = 1) -> dict:
    """Closed forms against the strip solver (and optionally the packet run).

    The report carries one record per grid point and an ``adjudication``
    entry naming the ``R_II`` counting modes that match the strip-solver
    total within :data:`TOTAL_TOL` at every point.
    """
    if spec.mode != "oracle-compare":
        spec = replace(spec, mode="oracle-compare")
    return run_sweep(spec, jobs)


def _adjudicate(spec, records):
    ok = [r for r in records if r["status"] == "ok"]
    out = {"points": len(records), "evaluated": len(ok),
           "ratio_pass": all(r["ratio_pass"] for r in ok) and bool(ok)}
    if len(spec.params.layers) == 2:
        out["matching_modes"] = [m for m in MODES if ok and all(r[f"match_{m}"] for r in ok)]
        out["max_abs_delta"] = {m: max((abs(r[f"R_{m}"] - r["R_strip"]) for r in ok), default=None)
                                for m in MODES}
    if spec.packet:
        out["packet_pass"] = all(r["packet_pass"] for r in ok) and bool(ok)
    return out


def _meta(spec, start):
    return {"params": spec.to_dict()["params"], "spec": spec.to_dict(),
            "version": __version__, "wall_time": time.perf_counter() - start}


# --- output --------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def format_csv(result: dict) -> str:
    records = result["records"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = list(records[0]) if records else []
    writer.writerow(cols)
    for rec in records:
        writer.writerow([_cell(rec[c]) for c in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def format_json(result: dict) -> str:
    return json.dumps(_jsonable(result), indent=2) + "\n"


def write_output(result: dict, spec: SweepSpec) -> str:
    """Format ``result`` per ``spec.format`` and write it to ``spec.out`` (if set)."""
    text = format_csv(result) if spec.format == "csv" else format_json(result)
    if spec.out:
        with open(spec.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
