"""Schatten norms, spectral radius, and the uniform-smoothness gap.

Matrices are real 2-D float64 arrays with finite entries. Wire formats
(JSON object and CSV) are provided here; both readers reject NaN/Inf.

The smoothness gap of a pair (a, b) at exponent p is

    gap = ||a||_p^2 + (p-1)*||b||_p^2 - [ (||a+b||_p^p + ||a-b||_p^p)/2 ]^(2/p)

which is nonnegative for p >= 2, nonpositive for 1 <= p <= 2, and zero at
p = 2 (parallelogram identity). p - 1 is the optimal constant.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

# Singular values below this are treated as exact zeros in log-domain sums.
TINY_SINGULAR_VALUE = 1e-300
# Above this exponent, norms are evaluated via log-sum-exp.
LOG_DOMAIN_P = 64.0


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D float64 matrix with finite entries."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} must have positive dimensions")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def _check_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidParameterError(f"Schatten exponent must satisfy p >= 1, got {p}")
    return p


def singular_values(a) -> np.ndarray:
    """Singular values in nonincreasing order."""
    arr = as_matrix(a)
    return np.linalg.svd(arr, compute_uv=False)


def norm_from_singular_values(s: np.ndarray, p) -> np.ndarray | float:
    """l_p norm of singular values; vectorized over leading axes of ``s``."""
    p = _check_p(p)
    s = np.asarray(s, dtype=float)
    if math.isinf(p):
        return s.max(axis=-1)
    top = s.max(axis=-1, keepdims=True)
    if p > LOG_DOMAIN_P:
        # log-sum-exp over p*log(sigma); tiny values are exact zeros
        with np.errstate(divide="ignore"):
            logs = np.where(s > TINY_SINGULAR_VALUE, np.log(np.maximum(s, TINY_SINGULAR_VALUE)), -np.inf)
        peak = logs.max(axis=-1, keepdims=True)
        safe_peak = np.where(np.isfinite(peak), peak, 0.0)
        with np.errstate(divide="ignore"):
            total = np.log(np.exp(p * (logs - safe_peak)).sum(axis=-1)) / p + np.squeeze(safe_peak, -1)
        return np.where(np.squeeze(np.isfinite(peak), -1), np.exp(total), 0.0)
    # factor out the top singular value so s**p cannot overflow
    safe_top = np.where(top > 0.0, top, 1.0)
    total = ((s / safe_top) ** p).sum(axis=-1) ** (1.0 / p)
    return np.squeeze(safe_top, -1) * total


def schatten_norm(a, p) -> float:
    """Schatten p-norm; p = math.inf gives the spectral norm."""
    p = _check_p(p)
    arr = as_matrix(a)
    if p == 2.0:
        return float(np.linalg.norm(arr))
    return float(norm_from_singular_values(singular_values(arr), p))


def spectral_norm(a) -> float:
    return float(singular_values(a)[0])


def spectral_radius(a) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"spectral radius needs a square matrix, got {arr.shape}")
    return float(np.abs(np.linalg.eigvals(arr)).max())


def smoothness_gap(a, b, p) -> float:
    """Slack of the two-point smoothness inequality at exponent p (finite)."""
    p = _check_p(p)
    if math.isinf(p):
        raise InvalidParameterError("smoothness gap requires finite p")
    am = as_matrix(a, "a")
    bm = as_matrix(b, "b")
    if am.shape != bm.shape:
        raise InvalidInputError(f"shape mismatch: {am.shape} vs {bm.shape}")
    x = schatten_norm(am + bm, p)
    y = schatten_norm(am - bm, p)
    top = max(x, y)
    if top == 0.0:
        mean = 0.0
    else:
        mean = top * (0.5 * ((x / top) ** p + (y / top) ** p)) ** (1.0 / p)
    return schatten_norm(am, p) ** 2 + (p - 1.0) * schatten_norm(bm, p) ** 2 - mean**2


def moment_norm(values, q, weights=None) -> float:
    """(sum_k w_k * v_k^q)^(1/q) for nonnegative values; exact finite moments."""
    q = float(q)
    if not q >= 1.0:
        raise InvalidParameterError(f"moment order must satisfy q >= 1, got {q}")
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError("moment_norm expects a flat value list")
    if weights is None:
        w = np.full(v.shape, 1.0 / v.size)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != v.shape:
            raise InvalidInputError("weights must match values")
    top = v.max(initial=0.0)
    if top == 0.0:
        return 0.0
    return float(top * (w @ (v / top) ** q) ** (1.0 / q))


# ---------------------------------------------------------------------------
# wire formats

def matrix_to_json(a) -> dict:
    arr = as_matrix(a)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [float(x) for x in arr.ravel(order="C")],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InvalidInputError("matrix JSON must be an object")
    missing = {"rows", "cols", "data"} - set(obj)
    if missing:
        raise InvalidInputError(f"matrix JSON missing keys: {sorted(missing)}")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows <= 0 or cols <= 0:
        raise InvalidInputError("rows/cols must be positive integers")
    data = obj["data"]
    if len(data) != rows * cols:
        raise InvalidInputError(f"expected {rows * cols} entries, got {len(data)}")
    try:
        arr = np.asarray(data, dtype=float).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad matrix data: {exc}") from None
    return as_matrix(arr)


def format_float(x: float) -> str:
    """17 significant digits, '.' decimal separator; round-trips float64."""
    return format(float(x), ".17g")


def matrix_to_csv(a) -> str:
    arr = as_matrix(a)
    return "\n".join(",".join(format_float(x) for x in row) for row in arr) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise InvalidInputError(f"CSV line {lineno}: {exc}") from None
    if not rows:
        raise InvalidInputError("CSV matrix is empty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidInputError("CSV rows have inconsistent lengths")
    return as_matrix(np.asarray(rows, dtype=float))
