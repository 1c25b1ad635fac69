"""Monte Carlo simulation and exact enumeration of random matrix products.

Products are formed left to right: Z_n = Y_n ... Y_1 Z_0, with factor i drawn
from the i-th ensemble. Trial k consumes only the stream derived from
(seed, *key, k), so estimates are bitwise reproducible under any execution
schedule. Inverse mode returns (Y_n ... Y_1 Z_0)^(-1) built from per-factor
linear solves; adapted mode threads a history-dependent hook and also tracks
the running product of realized conditional means F_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.stats

from .ensembles import (
    FactorEnsemble,
    FactorStats,
    ensemble_from_config,
    ensemble_to_config,
    householder_direction,
    make_bounded_perturbation,
    support_stats,
)
from .errors import (
    EnumerationInfeasibleError,
    InvalidInputError,
    InvalidParameterError,
    UnsupportedEnsembleError,
)
from .schatten import as_matrix, matrix_from_json, matrix_to_json, norm_from_singular_values
from .streams import substream

MODES = ("independent", "adapted", "inverse", "triangular")
ENUMERATION_BUDGET = 2**20
CONDITION_LIMIT = 1e12


# ---------------------------------------------------------------------------
# specifications

@dataclass(frozen=True, eq=False)
class ProductSpec:
    """What to multiply: factor ensembles, a start matrix, and a mode."""

    factors: tuple
    z0: np.ndarray
    mode: str = "independent"
    adapted_hook: Optional[object] = None
    n_steps: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        z0 = as_matrix(self.z0, "z0")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.mode == "adapted":
            if self.adapted_hook is None:
                raise InvalidParameterError("adapted mode needs an adapted_hook")
            if self.n is None or self.n < 1:
                raise InvalidParameterError("adapted mode needs n_steps or factors")
        else:
            if not self.factors:
                raise InvalidParameterError("need at least one factor")
            dims = {e.dim for e in self.factors}
            if dims != {z0.shape[0]}:
                raise InvalidInputError("factor dimensions must match rows of z0")
        if self.mode == "inverse" and z0.shape[0] != z0.shape[1]:
            raise InvalidInputError("inverse mode needs a square start matrix")

    @property
    def d(self) -> int:
        return self.z0.shape[0]

    @property
    def r(self) -> int:
        return self.z0.shape[1]

    @property
    def n(self) -> Optional[int]:
        if self.factors:
            return len(self.factors)
        return self.n_steps


@dataclass(frozen=True)
class MCEstimate:
    quantity: str
    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    level: float = 0.99

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "mean": self.mean,
            "std_error": self.std_error,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "trials": self.trials,
            "seed": self.seed,
            "level": self.level,
        }


@dataclass
class SimulationResult:
    z: list
    trials: int
    seed: int
    f: Optional[list] = None
    excluded: int = 0
    excluded_indices: list = field(default_factory=list)


@dataclass(frozen=True)
class TailEstimate:
    quantity: str
    threshold: float
    frequency: float
    hits: int
    trials: int
    ucl: float
    lcl: float
    level: float = 0.99

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "threshold": self.threshold,
            "frequency": self.frequency,
            "hits": self.hits,
            "trials": self.trials,
            "ucl": self.ucl,
            "lcl": self.lcl,
            "level": self.level,
        }


# ---------------------------------------------------------------------------
# adapted hooks

def _draw_from_support(support, rng) -> np.ndarray:
    u = rng.random()
    acc = 0.0
    for mat, prob in support:
        acc += prob
        if u < acc:
            return mat
    return support[-1][0]


def _conditional_mean(support) -> np.ndarray:
    return sum(prob * mat for mat, prob in support)


@dataclass(frozen=True, eq=False)
class NormBiasedTwoPointHook:
    """Two-point factors I +/- scale*U whose sign bias flips with history.

    While the running product of past draws has Frobenius norm at most that of
    the identity, the + sign has probability ``high``; once the product norm
    exceeds it, the bias flips to 1 - high. Conditional statistics hold for
    every history, so the adapted product bounds apply.
    """

    dim: int
    scale: float = 0.05
    high: float = 0.7

    def __post_init__(self):
        if not 0.0 < self.high < 1.0:
            raise InvalidParameterError("bias must lie in (0, 1)")
        if not 0.0 < self.scale:
            raise InvalidParameterError("scale must be positive")

    def conditional_support(self, history):
        eye = np.eye(self.dim)
        running = eye
        for y in history:
            running = y @ running
        pi = self.high if np.linalg.norm(running) <= math.sqrt(self.dim) else 1.0 - self.high
        spike = self.scale * householder_direction(self.dim)
        return ((eye + spike, pi), (eye - spike, 1.0 - pi))

    def factor_stats(self) -> FactorStats:
        swing = abs(2.0 * self.high - 1.0)
        m = 1.0 + self.scale * swing
        dev = self.scale * (1.0 + swing)  # worst-case ||Y - E_{i-1} Y||
        return FactorStats(mean_norm=m, sigma=dev / m, q=2.0,
                           uniform_norm=max(m, 1.0 + self.scale),
                           sigma_uniform=dev / m)


@dataclass(frozen=True, eq=False)
class HistoryFreeHook:
    """Adapted-mode wrapper around a finite-support ensemble, ignoring history."""

    ensemble: FactorEnsemble

    def __post_init__(self):
        if self.ensemble.support is None:
            raise UnsupportedEnsembleError("history-free hooks need a finite support")

    @property
    def dim(self) -> int:
        return self.ensemble.dim

    def conditional_support(self, history):
        return self.ensemble.support

    def factor_stats(self) -> FactorStats:
        return support_stats(self.ensemble)


# ---------------------------------------------------------------------------
# simulation

def expected_product(spec: ProductSpec) -> np.ndarray:
    """Exact E Z_n = (E Y_n) ... (E Y_1) Z_0 for independent factor draws."""
    if spec.mode not in ("independent", "triangular"):
        raise UnsupportedEnsembleError(
            f"expected_product is defined for independent products, not {spec.mode!r}")
    out = spec.z0
    for e in spec.factors:
        out = e.exact_mean() @ out
    return out


def _right_inverse_apply(w: np.ndarray, y: np.ndarray) -> np.ndarray:
    """w @ y^(-1) via a linear solve."""
    return np.linalg.solve(y.T, w.T).T


def simulate_product(spec: ProductSpec, trials, seed, key=()) -> SimulationResult:
    """Per-trial draws of Z_n (and F_n in adapted mode)."""
    trials = int(trials)
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    zs = []
    fs = [] if spec.mode == "adapted" else None
    excluded_indices = []

    if spec.mode == "inverse":
        start = np.linalg.solve(spec.z0, np.eye(spec.d))

    for k in range(trials):
        rng = substream(seed, *key, k)
        if spec.mode in ("independent", "triangular"):
            prod = spec.z0
            for e in spec.factors:
                prod = e.draw(rng) @ prod
            zs.append(prod)
        elif spec.mode == "inverse":
            prod = start
            cond_est = np.linalg.cond(spec.z0)
            for e in spec.factors:
                y = e.draw(rng)
                cond_est *= np.linalg.cond(y)
                prod = _right_inverse_apply(prod, y)
            if cond_est > CONDITION_LIMIT or not np.all(np.isfinite(prod)):
                excluded_indices.append(k)
            else:
                zs.append(prod)
        else:  # adapted
            hook = spec.adapted_hook
            prod = spec.z0
            ref = spec.z0
            history = []
            for _ in range(spec.n):
                support = hook.conditional_support(tuple(history))
                y = _draw_from_support(support, rng)
                prod = y @ prod
                ref = _conditional_mean(support) @ ref
                history.append(y)
            zs.append(prod)
            fs.append(ref)
    return SimulationResult(z=zs, trials=trials, seed=seed, f=fs,
                            excluded=len(excluded_indices),
                            excluded_indices=excluded_indices)


_Z99 = float(scipy.stats.norm.ppf(0.995))


def _z_value(level: float) -> float:
    if level == 0.99:
        return _Z99
    return float(scipy.stats.norm.ppf(0.5 + level / 2.0))


def _mean_estimate(values, quantity, seed, level) -> MCEstimate:
    n = values.size
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    z = _z_value(level)
    return MCEstimate(quantity, mean, se, mean - z * se, mean + z * se, n, seed, level)


def _moment_estimate(powers, q, quantity, seed, level) -> MCEstimate:
    n = powers.size
    m = float(powers.mean())
    se_m = float(powers.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    z = _z_value(level)
    mean = m ** (1.0 / q)
    se = se_m * m ** (1.0 / q - 1.0) / q if m > 0 else 0.0
    lo = max(m - z * se_m, 0.0) ** (1.0 / q)
    hi = (m + z * se_m) ** (1.0 / q)
    return MCEstimate(quantity, mean, se, lo, hi, n, seed, level)


def estimate_norm_statistics(result: SimulationResult, p=2.0, q=2.0,
                             reference=None, level=0.99) -> dict:
    """Norm statistics of simulated products, with delta-method moment errors.

    reference: matrix (defaults to nothing), or "adapted" to difference against
    the per-trial conditional-mean products F_n, or a list of per-trial
    matrices. Deviations are only reported when a reference is available.
    """
    if not result.z:
        raise InvalidParameterError("no included trials to analyze")
    q = float(q)
    if q < 1.0:
        raise InvalidParameterError("q must satisfy q >= 1")
    stack = np.stack(result.z)
    svals = np.linalg.svd(stack, compute_uv=False)
    spectral = svals[:, 0]
    schatten = np.asarray(norm_from_singular_values(svals, p), dtype=float)
    out = {
        "spectral-norm-mean": _mean_estimate(spectral, "spectral-norm-mean", result.seed, level),
        "schatten-moment": _moment_estimate(schatten**q, q, "schatten-moment", result.seed, level),
    }
    if stack.shape[1] == stack.shape[2]:
        radii = np.abs(np.linalg.eigvals(stack)).max(axis=1)
        out["spectral-radius-mean"] = _mean_estimate(radii, "spectral-radius-mean", result.seed, level)

    refs = None
    if isinstance(reference, str) and reference == "adapted":
        if result.f is None:
            raise InvalidParameterError("no adapted references recorded")
        refs = np.stack(result.f)
    elif reference is not None:
        ref = np.asarray(reference, dtype=float)
        refs = np.stack(reference) if ref.ndim == 3 else ref[None, :, :]
    if refs is not None:
        dev = stack - refs
        dsv = np.linalg.svd(dev, compute_uv=False)
        dspec = dsv[:, 0]
        dsch = np.asarray(norm_from_singular_values(dsv, p), dtype=float)
        out["deviation-norm-mean"] = _mean_estimate(dspec, "deviation-norm-mean", result.seed, level)
        out["deviation-schatten-moment"] = _moment_estimate(
            dsch**q, q, "deviation-schatten-moment", result.seed, level)
    return out


def clopper_pearson(hits: int, trials: int, level=0.99):
    """One-sided lower/upper confidence limits for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    lcl = 0.0 if hits == 0 else float(scipy.stats.beta.ppf(1.0 - level, hits, trials - hits + 1))
    ucl = 1.0 if hits == trials else float(scipy.stats.beta.ppf(level, hits + 1, trials - hits))
    return lcl, ucl


def tail_frequencies(result: SimulationResult, thresholds, reference=None,
                     level=0.99) -> list:
    """Empirical P{||Z|| >= x} (and deviations when a reference is given)."""
    stack = np.stack(result.z)
    spectral = np.linalg.svd(stack, compute_uv=False)[:, 0]
    out = []
    quantities = [("growth-tail", spectral)]
    if reference is not None:
        refs = np.asarray(reference, dtype=float)
        refs = refs[None, :, :] if refs.ndim == 2 else refs
        dev = np.linalg.svd(stack - refs, compute_uv=False)[:, 0]
        quantities.append(("deviation-tail", dev))
    n = stack.shape[0]
    for name, values in quantities:
        for x in thresholds:
            hits = int((values >= x).sum())
            lcl, ucl = clopper_pearson(hits, n, level)
            out.append(TailEstimate(name, float(x), hits / n, hits, n, ucl, lcl, level))
    return out


# ---------------------------------------------------------------------------
# exact enumeration

@dataclass
class EnumerationReport:
    outcomes: int
    p: float
    q: float
    mean: np.ndarray
    growth_mean: float
    deviation_mean: float
    growth_moment: float
    deviation_moment: float
    spectral_radius_mean: Optional[float] = None
    tail_growth: dict = field(default_factory=dict)
    tail_deviation: dict = field(default_factory=dict)
    reference: str = "mean"  # deviations measured against EZ, or "adapted" for F_n


def _support_or_raise(e: FactorEnsemble):
    if e.support is None:
        raise UnsupportedEnsembleError(f"{e.kind} ensemble has no finite support")
    return e.support


def _enumerate_independent(spec, invert):
    """Yield (weights, products) chunkwise over all support combinations."""
    supports = [_support_or_raise(e) for e in spec.factors]
    sizes = [len(s) for s in supports]
    total = 1
    for k in sizes:
        total *= k
    if total > ENUMERATION_BUDGET:
        raise EnumerationInfeasibleError(
            f"enumeration needs {total} outcomes, budget is {ENUMERATION_BUDGET}",
            required=total, budget=ENUMERATION_BUDGET)
    atoms = []
    probs = []
    for s in supports:
        mats = [m for m, _ in s]
        if invert:
            mats = [np.linalg.solve(m, np.eye(spec.d)) for m in mats]
        atoms.append(np.stack(mats))
        probs.append(np.array([pr for _, pr in s]))
    if invert:
        start = np.linalg.solve(spec.z0, np.eye(spec.d))
    else:
        start = spec.z0

    chunk = 8192
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total))
        digits = np.unravel_index(idx, sizes)
        w = np.ones(idx.size)
        prod = np.broadcast_to(start, (idx.size, *start.shape)).copy()
        # factor 1 acts first; in inverse mode its inverse is leftmost instead
        for step, dig in enumerate(digits):
            w = w * probs[step][dig]
            if invert:
                prod = prod @ atoms[step][dig]
            else:
                prod = atoms[step][dig] @ prod
        yield w, prod
    return


def _enumerate_adapted(spec):
    """Depth-first path walk; yields (weight, product, conditional-mean product).

    Iterative with an explicit frame stack: path counts run up to the full
    enumeration budget, deep nesting of generators would dominate the cost.
    """
    hook = spec.adapted_hook
    n = spec.n
    count = 0
    history = []
    support = hook.conditional_support(())
    # frame: [support, next atom index, weight, prod, ref, conditional mean]
    stack = [[support, 0, 1.0, spec.z0, spec.z0, _conditional_mean(support)]]
    while stack:
        frame = stack[-1]
        support, idx = frame[0], frame[1]
        if idx >= len(support):
            stack.pop()
            if history:
                history.pop()
            continue
        frame[1] = idx + 1
        mat, prob = support[idx]
        if prob == 0.0:
            continue
        weight = frame[2] * prob
        prod = mat @ frame[3]
        ref = frame[5] @ frame[4]
        if len(stack) == n:
            count += 1
            if count > ENUMERATION_BUDGET:
                raise EnumerationInfeasibleError(
                    f"adapted enumeration exceeded the {ENUMERATION_BUDGET}-path budget",
                    required=count, budget=ENUMERATION_BUDGET)
            yield weight, prod, ref
        else:
            history.append(mat)
            sub = hook.conditional_support(tuple(history))
            stack.append([sub, 0, weight, prod, ref, _conditional_mean(sub)])


class _StreamStats:
    """Weighted accumulators over chunks of (weight, product, deviation)."""

    def __init__(self, p, q, square, thresholds_growth, thresholds_deviation):
        self.p, self.q, self.square = p, q, square
        self.tg = {float(x): 0.0 for x in thresholds_growth}
        self.td = {float(x): 0.0 for x in thresholds_deviation}
        self.growth = self.dev = self.growth_q = self.dev_q = 0.0
        self.radius = 0.0
        self.outcomes = 0

    def add(self, w, prods, dev):
        svals = np.linalg.svd(prods, compute_uv=False)
        spectral = svals[:, 0]
        schatten = np.asarray(norm_from_singular_values(svals, self.p), dtype=float)
        dsv = np.linalg.svd(dev, compute_uv=False)
        dspec = dsv[:, 0]
        dsch = np.asarray(norm_from_singular_values(dsv, self.p), dtype=float)
        self.growth += float(w @ spectral)
        self.dev += float(w @ dspec)
        self.growth_q += float(w @ schatten**self.q)
        self.dev_q += float(w @ dsch**self.q)
        if self.square:
            self.radius += float(w @ np.abs(np.linalg.eigvals(prods)).max(axis=1))
        for x in self.tg:
            self.tg[x] += float(w @ (spectral >= x))
        for x in self.td:
            self.td[x] += float(w @ (dspec >= x))
        self.outcomes += prods.shape[0]

    def report(self, mean, reference) -> "EnumerationReport":
        return EnumerationReport(
            outcomes=self.outcomes, p=float(self.p), q=self.q, mean=mean,
            growth_mean=self.growth, deviation_mean=self.dev,
            growth_moment=self.growth_q ** (1.0 / self.q),
            deviation_moment=self.dev_q ** (1.0 / self.q),
            spectral_radius_mean=self.radius if self.square else None,
            tail_growth=self.tg, tail_deviation=self.td, reference=reference)


def enumerate_product(spec: ProductSpec, p=2.0, q=2.0,
                      thresholds_growth=(), thresholds_deviation=()) -> EnumerationReport:
    """Exact moments and tails by enumerating every support combination.

    Deviations are against the exact mean of the enumerated product, except in
    adapted mode where each path is differenced against its own product of
    conditional means.
    """
    q = float(q)
    if q < 1.0:
        raise InvalidParameterError("q must satisfy q >= 1")
    square = spec.d == spec.r
    stats = _StreamStats(p, q, square, thresholds_growth, thresholds_deviation)

    if spec.mode == "adapted":
        paths = list(_enumerate_adapted(spec))
        weights = np.array([w for w, _, _ in paths])
        prods = np.stack([z for _, z, _ in paths])
        refs = np.stack([f for _, _, f in paths])
        mean = np.einsum("k,kij->ij", weights, prods)
        stats.add(weights, prods, prods - refs)
        return stats.report(mean, "adapted")

    invert = spec.mode == "inverse"
    if invert:
        # the mean of an inverted product has no closed form; stream it first
        mean = np.zeros((spec.d, spec.d))
        for w, prod in _enumerate_independent(spec, invert):
            mean = mean + np.einsum("k,kij->ij", w, prod)
    else:
        mean = expected_product(spec)
    for w, prod in _enumerate_independent(spec, invert):
        stats.add(w, prod, prod - mean[None, :, :])
    return stats.report(mean, "mean")


# ---------------------------------------------------------------------------
# triangular arrays and conjugation

@dataclass
class TriangularRow:
    n: int
    deviation_from_mean: MCEstimate
    deviation_from_exponential: MCEstimate
    scaled_mean: float
    scaled_std_error: float
    scaled_bound: float


def triangular_array_run(mean, radius, dim, n_list, trials, seed,
                         support="two-point", level=0.99) -> list:
    """Row n multiplies n factors I + X/n; reports sqrt(n)-scaled deviations.

    Deviations are measured against the exact row mean (I + A/n)^n and against
    the limiting exponential e^A. The scaled bound column is the row-free
    constant sqrt(1 + 2 log d) * L * e^(1 + T).
    """
    a = as_matrix(mean, "mean")
    if a.shape != (dim, dim):
        raise InvalidInputError(f"mean must be {dim}x{dim}")
    n_list = [int(n) for n in n_list]
    if any(n < 1 for n in n_list):
        raise InvalidParameterError("row sizes must be positive")
    big_t = float(np.linalg.svd(a, compute_uv=False)[0])
    expm = scipy.linalg.expm(a)
    scaled_bound = math.sqrt(1.0 + 2.0 * math.log(dim)) * float(radius) * math.exp(1.0 + big_t)

    rows = []
    for row_index, n in enumerate(n_list):
        e = make_bounded_perturbation(dim, a, radius, n, support)
        spec = ProductSpec(factors=(e,) * n, z0=np.eye(dim), mode="triangular")
        sim = simulate_product(spec, trials, seed, key=(row_index,))
        exact_mean = expected_product(spec)
        stack = np.stack(sim.z)
        dev_mean = np.linalg.svd(stack - exact_mean, compute_uv=False)[:, 0]
        dev_exp = np.linalg.svd(stack - expm, compute_uv=False)[:, 0]
        est_mean = _mean_estimate(dev_mean, "deviation-norm-mean", seed, level)
        est_exp = _mean_estimate(dev_exp, "deviation-from-exponential", seed, level)
        rows.append(TriangularRow(
            n=n,
            deviation_from_mean=est_mean,
            deviation_from_exponential=est_exp,
            scaled_mean=math.sqrt(n) * est_mean.mean,
            scaled_std_error=math.sqrt(n) * est_mean.std_error,
            scaled_bound=scaled_bound,
        ))
    return rows


def conjugated_spec(spec: ProductSpec, s_matrix, q=2.0, trials=4096, seed=0) -> ProductSpec:
    """Similarity-transform every factor: Y -> S^(-1) Y S.

    Statistics are recomputed for the transformed factors (exactly from finite
    supports, else by Monte Carlo), since conjugation does not transport them.
    """
    if spec.mode not in ("independent", "triangular"):
        raise UnsupportedEnsembleError("conjugation applies to independent products")
    s = as_matrix(s_matrix, "S")
    if s.shape[0] != s.shape[1] or s.shape[0] != spec.d:
        raise InvalidInputError("S must be square with the factor dimension")
    if spec.z0.shape[0] != spec.z0.shape[1]:
        raise InvalidInputError("conjugation needs a square start matrix")
    if np.linalg.cond(s) > CONDITION_LIMIT:
        raise InvalidInputError("S is too ill-conditioned to conjugate by")
    s_inv = np.linalg.solve(s, np.eye(spec.d))

    new_factors = []
    for idx, e in enumerate(spec.factors):
        def sampler(rng, _e=e):
            return s_inv @ _e.draw(rng) @ s

        mean = None
        if e.mean is not None or e.support is not None:
            mean = s_inv @ e.exact_mean() @ s
        support = None
        if e.support is not None:
            support = tuple((s_inv @ m @ s, pr) for m, pr in e.support)
        shell = FactorEnsemble(
            dim=e.dim, sampler=sampler, stats=e.stats, mean=mean, support=support,
            kind=f"conjugated-{e.kind}")
        if support is not None:
            stats = support_stats(shell, q)
        else:
            from .ensembles import estimate_factor_stats
            stats = estimate_factor_stats(shell, q, trials=trials, seed=seed + idx)
        new_factors.append(FactorEnsemble(
            dim=e.dim, sampler=sampler, stats=stats, mean=mean, support=support,
            kind=f"conjugated-{e.kind}"))
    return ProductSpec(factors=tuple(new_factors),
                       z0=s_inv @ spec.z0 @ s,
                       mode=spec.mode)


# ---------------------------------------------------------------------------
# configuration

def spec_from_config(obj) -> ProductSpec:
    """Build a ProductSpec from its JSON object form."""
    if not isinstance(obj, dict):
        raise InvalidInputError("product spec config must be an object")
    factors = []
    for entry in obj.get("factors", []):
        if "ensemble" in entry:
            e = ensemble_from_config(entry["ensemble"])
            count = int(entry.get("count", 1))
        else:
            e = ensemble_from_config(entry)
            count = 1
        if count < 1:
            raise InvalidInputError("factor count must be positive")
        factors.extend([e] * count)
    if not factors:
        raise InvalidInputError("product spec needs at least one factor")
    dim = factors[0].dim
    z0_obj = obj.get("z0", "identity")
    z0 = np.eye(dim) if z0_obj == "identity" else matrix_from_json(z0_obj)
    return ProductSpec(factors=tuple(factors), z0=z0, mode=obj.get("mode", "independent"))


def spec_to_config(spec: ProductSpec) -> dict:
    groups = []
    for e in spec.factors:
        cfg = ensemble_to_config(e)
        if groups and groups[-1]["ensemble"] == cfg:
            groups[-1]["count"] += 1
        else:
            groups.append({"ensemble": cfg, "count": 1})
    return {
        "factors": groups,
        "z0": "identity" if np.array_equal(spec.z0, np.eye(spec.d)) else matrix_to_json(spec.z0),
        "mode": spec.mode,
    }
