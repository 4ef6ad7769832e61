"""Datasets, file formats and the synthetic generators used in experiments.

CSV files use ``,`` as delimiter, ``.`` as decimal point and LF line ends;
floats are written with 17 significant digits so a write/read round trip is
bit-exact.  Random generators are numpy ``Generator(PCG64)`` seeded from an
integer.
"""

from dataclasses import dataclass
import csv
import hashlib
import json

import numpy as np

from .poly import ExponentSet, TropicalPolynomial
from .ratfit import TropicalRational

MODEL_FORMAT = "troprat-model"
MODEL_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = f"{path}:" if path else ""
        where += f"line {line}: " if line else (" " if path else "")
        super().__init__(f"{where}{message}")


@dataclass
class Dataset:
    points: np.ndarray
    targets: np.ndarray = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim == 1:
            self.points = self.points.reshape(-1, 1)
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError("dataset needs at least one point")
        if not np.isfinite(self.points).all():
            raise ValueError("points must be finite")
        if self.targets is not None:
            self.targets = np.asarray(self.targets, dtype=np.float64).reshape(-1)
            if self.targets.shape[0] != self.points.shape[0]:
                raise ValueError("points and targets differ in length")
            if not np.isfinite(self.targets).all():
                raise ValueError("targets must be finite")

    @property
    def n(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def fmt(v):
    return format(float(v), ".17g")


def csv_text(ds):
    """Canonical CSV serialisation of a dataset."""
    header = [f"x{j + 1}" for j in range(ds.n)]
    cols = [ds.points]
    if ds.targets is not None:
        header.append("y")
        cols.append(ds.targets[:, None])
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in np.hstack(cols)]
    return "\n".join(lines) + "\n"


def write_csv(ds, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(ds))


def read_csv(path, require_targets=True):
    """Parse a ``x1,...,xn,y`` file.  ``y`` may be absent if not required."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("missing header", path)
    header = [h.strip() for h in rows[0]]
    has_y = bool(header) and header[-1] == "y"
    xcols = header[:-1] if has_y else header
    if not xcols or xcols != [f"x{j + 1}" for j in range(len(xcols))]:
        raise ParseError(f"bad header {','.join(header)!r}, expected x1,...,xn,y", path, 1)
    if require_targets and not has_y:
        raise ParseError("header lacks the target column 'y'", path, 1)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        try:
            parsed = [float(v) for v in row]
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", path, lineno) from None
        if not all(np.isfinite(parsed)):
            raise ParseError("non-finite value", path, lineno)
        values.append(parsed)
    if not values:
        raise ParseError("no data rows", path)
    arr = np.array(values)
    if has_y:
        return Dataset(arr[:, :-1], arr[:, -1])
    return Dataset(arr)


def read_table(path):
    """Generic numeric CSV reader: ``{column: list}``; blank fields become None."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("missing header", path)
    header = rows[0]
    table = {h: [] for h in header}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        for h, v in zip(header, row):
            try:
                table[h].append(float(v) if v != "" else None)
            except ValueError:
                raise ParseError(f"non-numeric field {v!r}", path, lineno) from None
    return table


def write_table(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else (str(v) if isinstance(v, (int, np.integer))
                                                     else fmt(v)) for v in row) + "\n")


def write_trace(trace, path):
    """Trace CSV ``k,e,eta``; row 0 is the initial model, eta blank for k <= 1."""
    rows = [(0, trace.e0, None)] + [(r.k, r.e, r.eta) for r in trace.records]
    write_table(path, ["k", "e", "eta"], rows)


def dataset_digest(ds):
    """SHA-256 of the canonical CSV text, for golden-value checks."""
    return hashlib.sha256(csv_text(ds).encode("utf-8")).hexdigest()


# -- model files -------------------------------------------------------------

def _encode_coeffs(c):
    return ["-inf" if v == -np.inf else float(v) for v in c]


def _decode_coeffs(c):
    out = []
    for v in c:
        if v == "-inf":
            out.append(-np.inf)
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(float(v))
        else:
            raise ParseError(f"bad coefficient {v!r}")
    return np.array(out)


def model_to_dict(model, provenance=None):
    W = model.exponents
    if W.is_grid:
        exps = {"kind": "grid", "degrees": list(W.degrees), "order": "lex-last-fastest"}
    else:
        exps = {"kind": "explicit", "list": [list(w) for w in W.explicit]}
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n": W.n,
        "exponents": exps,
        "p": _encode_coeffs(model.p.coeffs),
        "q": _encode_coeffs(model.q.coeffs),
        "scale_c": float(model.scale_c),
        "provenance": provenance or {},
    }


def model_from_dict(d):
    if d.get("format") != MODEL_FORMAT:
        raise ParseError(f"not a model file (format={d.get('format')!r})")
    if d.get("version") != MODEL_VERSION:
        raise ParseError(f"unsupported model version {d.get('version')!r}")
    exps = d["exponents"]
    if exps["kind"] == "grid":
        W = ExponentSet.grid(exps["degrees"])
    elif exps["kind"] == "explicit":
        W = ExponentSet.from_list(exps["list"])
    else:
        raise ParseError(f"unknown exponent kind {exps['kind']!r}")
    if W.n != d["n"]:
        raise ParseError("exponent dimension does not match n")
    return TropicalRational(TropicalPolynomial(W, _decode_coeffs(d["p"])),
                            TropicalPolynomial(W, _decode_coeffs(d["q"])),
                            float(d.get("scale_c", 1.0)))


def dumps_model(model, provenance=None):
    return json.dumps(model_to_dict(model, provenance), indent=1) + "\n"


def save_model(model, path, provenance=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model, provenance))


def load_model(path):
    """Returns ``(model, provenance)``."""
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), path) from None
    try:
        return model_from_dict(d), d.get("provenance", {})
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed model file ({exc})", path) from None


# -- generators --------------------------------------------------------------

def gen_sine(n_points=200, x_range=(-1.0, 12.0), noise_sigma=0.1, seed=0):
    """Equally spaced ``x`` with ``y = sin(x) + N(0, sigma^2)`` noise."""
    if n_points < 2:
        raise ValueError("need at least two points")
    x = np.linspace(x_range[0], x_range[1], n_points)
    y = np.sin(x)
    if noise_sigma > 0:
        y = y + np.random.default_rng(seed).normal(0.0, noise_sigma, n_points)
    return Dataset(x, y)


def peaks(x1, x2):
    return (3 * (1 - x1) ** 2 * np.exp(-x1 ** 2 - (x2 + 1) ** 2)
            - 10 * (x1 / 5 - x1 ** 3 - x2 ** 5) * np.exp(-x1 ** 2 - x2 ** 2)
            - np.exp(-(x1 + 1) ** 2 - x2 ** 2) / 3)


def gen_peaks(grid_side=49):
    """``grid_side**2`` grid points on [-3, 3]^2, x1 slow and x2 fast."""
    if grid_side < 2:
        raise ValueError("grid_side must be at least 2")
    g = np.linspace(-3.0, 3.0, grid_side)
    a, b = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([a.ravel(), b.ravel()])
    return Dataset(pts, peaks(pts[:, 0], pts[:, 1]))


def g6(x):
    x = np.atleast_2d(x)
    return x[:, 0] * x[:, 1] * x[:, 2] + 2 * x[:, 3] * x[:, 4] ** 2 * np.sin(x[:, 5] ** 2)


def h10(x):
    x = np.atleast_2d(x)
    return g6(x) - np.exp(x[:, 6] * x[:, 7] * x[:, 8] * x[:, 9])


def gen_g6(n_points, seed=0):
    pts = np.random.default_rng(seed).uniform(0.0, 1.0, (n_points, 6))
    return Dataset(pts, g6(pts))


def gen_h10(n_points, seed=0):
    pts = np.random.default_rng(seed).uniform(0.0, 1.0, (n_points, 10))
    return Dataset(pts, h10(pts))


def gen_tropical_rational(n, degree, n_points, coeff_range=(-5.0, 5.0), box=(-5.0, 5.0),
                          seed=0):
    """Random ground-truth rational on ``{0..degree}^n`` and its exact samples.

    Draw order: numerator coefficients, denominator coefficients, points.
    """
    if n < 1 or degree < 0:
        raise ValueError("need n >= 1 and degree >= 0")
    rng = np.random.default_rng(seed)
    W = ExponentSet.grid([degree] * n)
    p = rng.uniform(*coeff_range, len(W))
    q = rng.uniform(*coeff_range, len(W))
    pts = rng.uniform(box[0], box[1], (n_points, n))
    truth = TropicalRational(TropicalPolynomial(W, p), TropicalPolynomial(W, q))
    return Dataset(pts, truth(pts)), truth
