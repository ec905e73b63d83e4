"""Deterministic file emission.

Floats are written with 17 significant digits so every double round-trips
exactly. CSV files open with a ``# config: ...`` comment line holding the
resolved configuration; JSON documents carry it under a ``"config"`` key.
"""

import csv
import io
import json
import math

FLOAT_FORMAT = "%.17g"


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return FLOAT_FORMAT % x


def plain(obj):
    """Convert dataclass-free nested data into JSON-ready values.

    Complex numbers become ``[re, im]``; numpy scalars and tuples are
    unwrapped.
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return plain(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                _emit(v, indent, level + 1, out)
                if i + 1 < len(obj):
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent=2):
    out = []
    _emit(plain(obj), indent, 0, out)
    out.append("\n")
    return "".join(out)


def config_comment(config):
    return "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":"))


def dumps_csv(columns, rows, config):
    """CSV text with the config comment, a header row and one line per row."""
    buf = io.StringIO()
    buf.write(config_comment(config) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _cell(value):
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    return value


def write_text(text, path=None, stream=None):
    """Write to ``path`` if given, else to ``stream``."""
    if path is None:
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def material_rows(samples):
    for x, y, m in samples:
        yield {
            "x": float(x),
            "y": float(y),
            "sigma_rr": float(m.sigma_radial),
            "sigma_tt": float(m.sigma_tangential),
            "lambda": float(m.lam),
            "region": m.region,
        }


def field_rows(grid):
    for r, theta, re_u, im_u, tag in grid.rows():
        yield {
            "r": float(r),
            "theta": float(theta),
            "re_u": float(re_u),
            "im_u": float(im_u),
            "region": tag,
        }


MATERIAL_COLUMNS = ("x", "y", "sigma_rr", "sigma_tt", "lambda", "region")
FIELD_COLUMNS = ("r", "theta", "re_u", "im_u", "region")
SWEEP_COLUMNS = ("n", "k", "R", "rho", "residual", "residual_n2", "abs_b", "abs_c", "gap_a", "dn_dev")
