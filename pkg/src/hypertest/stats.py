"""Closed forms, test statistics, estimators, and the regime classifier.

Covers the bounded-degree cycle test (long loose cycles, normal limit),
the dense-regime edge/vee/triangle tests and their combination across
layers, moment-based rate estimators, contiguity/orthogonality constants,
and the density-exponent phase classifier.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from fractions import Fraction
from math import comb, factorial, floor, log, sqrt
from statistics import NormalDist

import numpy as np

from .hypercore import Hypergraph, HypergraphError
from . import motifs

__all__ = [
    "SparseRegimeParams",
    "DenseRegimeParams",
    "CycleTestReport",
    "DenseTestReport",
    "CombinedTestReport",
    "EstimateReport",
    "TheoreticalEVT",
    "RegimeVerdict",
    "StatsError",
    "DegenerateDenominator",
    "DegenerateRate",
    "InvalidOrder",
    "DegenerateE",
    "ZeroDensity",
    "WeightNormViolation",
    "AllZeroDeltas",
    "MissingKappa",
    "AlphaOutOfRange",
    "snr_kappa",
    "lambda_m",
    "cycle_null_moments",
    "select_kn",
    "cycle_test",
    "estimate_ab",
    "contiguity_constants",
    "theoretical_evt",
    "dense_test",
    "combined_test",
    "optimal_weights",
    "trace_m0_power",
    "regime_classify",
    "normal_quantile",
    "suggest_overlap",
]


class StatsError(ValueError):
    """Base class for statistic-layer errors."""


class DegenerateDenominator(StatsError):
    pass


class DegenerateRate(StatsError):
    pass


class InvalidOrder(StatsError):
    pass


class DegenerateE(StatsError):
    pass


class ZeroDensity(StatsError):
    """Empty hypergraph: the dense statistics are undefined."""


class WeightNormViolation(StatsError):
    pass


class AllZeroDeltas(StatsError):
    pass


class MissingKappa(StatsError):
    pass


class AlphaOutOfRange(StatsError):
    pass


# ---------------------------------------------------------------------------
# parameter bundles


@dataclass(frozen=True)
class SparseRegimeParams:
    """Bounded-degree rates: probabilities a/n^(m-1) within, b/n^(m-1) between."""

    a: float
    b: float
    m: int
    k: int

    def __post_init__(self):
        if self.m < 2 or self.k < 2:
            raise InvalidOrder(f"need m, k >= 2, got m={self.m}, k={self.k}")
        if not (self.a >= self.b > 0):
            raise StatsError(f"need a >= b > 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class DenseRegimeParams:
    """Dense-regime rates a_n >= b_n with overlap index l and E[W]."""

    a_n: float
    b_n: float
    m: int
    k: int
    l: int
    mean_weight: float = 1.0

    def __post_init__(self):
        if self.m < 2 or self.k < 2:
            raise InvalidOrder(f"need m, k >= 2, got m={self.m}, k={self.k}")
        if not (1 <= self.l and 2 * self.l <= self.m):
            raise motifs.OverlapOutOfRange(f"need 1 <= l <= m/2, got l={self.l}")
        if not (self.a_n >= self.b_n > 0):
            raise StatsError(f"need a_n >= b_n > 0, got {self.a_n}, {self.b_n}")

    @classmethod
    def from_probabilities(cls, p_within, p_between, n, m, k, l, mean_weight=1.0):
        scale = float(n) ** (m - 1)
        return cls(a_n=p_within * scale, b_n=p_between * scale, m=m, k=k, l=l,
                   mean_weight=mean_weight)

    def probabilities(self, n: int) -> tuple[float, float]:
        scale = float(n) ** (self.m - 1)
        return self.a_n / scale, self.b_n / scale


# ---------------------------------------------------------------------------
# bounded-degree quantities


def snr_kappa(p: SparseRegimeParams) -> float:
    """Signal-to-noise ratio (a-b)^2 / (k^(m-1) (m-2)! [a + (k^(m-1)-1) b])."""
    blocks = p.k ** (p.m - 1)
    denom = blocks * factorial(p.m - 2) * (p.a + (blocks - 1) * p.b)
    if denom <= 0:
        raise DegenerateDenominator("mean-degree denominator is not positive")
    return (p.a - p.b) ** 2 / denom


def lambda_m(p: SparseRegimeParams) -> float:
    """Normalized mean rate (a + (k^(m-1)-1) b) / (k^(m-1) (m-2)!)."""
    blocks = p.k ** (p.m - 1)
    return (p.a + (blocks - 1) * p.b) / (blocks * factorial(p.m - 2))


def cycle_null_moments(p: SparseRegimeParams, k_n: int) -> tuple[float, float]:
    """Null and alternative means of the loose k_n-cycle count."""
    if k_n < 2:
        raise StatsError(f"cycle length k_n must be >= 2, got {k_n}")
    lam = lambda_m(p)
    f = (p.a - p.b) / (p.k ** (p.m - 1) * factorial(p.m - 2))
    mu0 = lam ** k_n / (2 * k_n)
    mu1 = mu0 + (p.k - 1) / (2 * k_n) * f ** k_n
    return mu0, mu1


def select_kn(n: int, lam: float, delta0: float = 1.99, gamma: float = 1.01) -> int:
    """Cycle length floor(delta0 * log_lam(log_gamma n)), at least 2.

    Boundary values of n can sit on a rounding knife edge; a 1e-9 nudge is
    applied before flooring and ties may differ by one from hand tables.
    """
    if lam <= 1:
        raise DegenerateRate(f"rate lambda={lam} must exceed 1")
    if n < 3:
        raise StatsError("need n >= 3")
    if gamma <= 1 or not 0 < delta0 < 2:
        raise StatsError("need gamma > 1 and 0 < delta0 < 2")
    val = delta0 * log(log(n) / log(gamma)) / log(lam)
    return max(2, floor(val + 1e-9))


@dataclass(frozen=True)
class CycleTestReport:
    k_n: int
    cycle_count: int
    lambda_m: float
    mu_n0: float
    mu_n1: float
    statistic: float
    alpha: float
    z_crit: float
    reject: bool

    def to_dict(self) -> dict:
        return asdict(self)


def cycle_test(
    g: Hypergraph,
    params: SparseRegimeParams,
    k_n: int | None = None,
    alpha: float = 0.05,
) -> CycleTestReport:
    """Two-sided test on the standardized loose k_n-cycle count."""
    lam = lambda_m(params)
    if k_n is None:
        k_n = select_kn(g.n, lam)
    mu0, mu1 = cycle_null_moments(params, k_n)
    x = motifs.count_loose_cycles(g, k_n)
    stat = (x - mu0) / sqrt(mu0)
    z = normal_quantile(alpha)
    return CycleTestReport(
        k_n=k_n, cycle_count=x, lambda_m=lam, mu_n0=mu0, mu_n1=mu1,
        statistic=stat, alpha=alpha, z_crit=z, reject=abs(stat) > z,
    )


@dataclass(frozen=True)
class EstimateReport:
    lambda_hat: float
    f_hat: float | None
    a_hat: float | None
    b_hat: float | None
    radicand: float
    edge_count: int
    cycle_count: int
    k_n: int
    m: int
    k: int
    n: int

    @property
    def ok(self) -> bool:
        return self.f_hat is not None

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_ab(
    edge_count: int, cycle_count: int, n: int, m: int, k: int, k_n: int
) -> EstimateReport:
    """Moment estimators of the within/between rates from the edge count
    and the loose k_n-cycle count.

    When the radicand 2 k_n X - lambda_hat^k_n is negative the real root
    does not exist; the report then carries no estimates.
    """
    lam_hat = n ** (m - 1) * edge_count / (factorial(m - 2) * comb(n, m))
    radicand = 2 * k_n * cycle_count - lam_hat ** k_n
    if radicand < 0:
        return EstimateReport(
            lambda_hat=lam_hat, f_hat=None, a_hat=None, b_hat=None,
            radicand=radicand, edge_count=edge_count, cycle_count=cycle_count,
            k_n=k_n, m=m, k=k, n=n,
        )
    f_hat = radicand ** (1.0 / k_n)
    blocks = k ** (m - 1)
    shrink = (k - 1) ** (-1.0 / k_n)
    fac = factorial(m - 2)
    a_hat = fac * (lam_hat + (blocks - 1) * shrink * f_hat)
    b_hat = fac * (lam_hat - shrink * f_hat)
    return EstimateReport(
        lambda_hat=lam_hat, f_hat=f_hat, a_hat=a_hat, b_hat=b_hat,
        radicand=radicand, edge_count=edge_count, cycle_count=cycle_count,
        k_n=k_n, m=m, k=k, n=n,
    )


def contiguity_constants(m: int, k: int) -> tuple[float, float]:
    """The pair (tau1, tau2) controlling the bounded-degree contiguity band.

    tau1 = C(m,2)^-1 sum_{i=1}^{ceil(m/2-1)} k^-(2i-1) C(m, i+2)
    tau2 = 1 + C(m,2)^-1 sum_{i=1}^{m-2} k^-2i C(m, i+2)
    evaluated in exact rational arithmetic (the half-integer ceiling at odd
    m must not drift).
    """
    if m < 3 or k < 2:
        raise InvalidOrder(f"need m >= 3 and k >= 2, got m={m}, k={k}")
    c2 = Fraction(comb(m, 2))
    upper1 = -(-(m - 2) // 2)  # ceil(m/2 - 1) for integer m
    tau1 = sum(
        (Fraction(comb(m, i + 2), k ** (2 * i - 1)) for i in range(1, upper1 + 1)),
        start=Fraction(0),
    ) / c2
    tau2 = 1 + sum(
        (Fraction(comb(m, i + 2), k ** (2 * i)) for i in range(1, m - 1)),
        start=Fraction(0),
    ) / c2
    return float(tau1), float(tau2)


def trace_m0_power(m: int, k: int, a: float, b: float, j: int) -> float:
    """Trace of the j-th power of the k x k block mean-rate matrix with
    diagonal a + (k^(m-2)-1) b and off-diagonal k^(m-2) b: the eigenvalues
    are a - b (multiplicity k-1) and a + (k^(m-1)-1) b."""
    if j < 1:
        raise StatsError(f"power j must be >= 1, got {j}")
    if m < 2 or k < 1:
        raise InvalidOrder(f"need m >= 2 and k >= 1, got m={m}, k={k}")
    return (a + (k ** (m - 1) - 1) * b) ** j + (k - 1) * (a - b) ** j


# ---------------------------------------------------------------------------
# dense-regime quantities


@dataclass(frozen=True)
class TheoreticalEVT:
    e: float
    v: float
    t: float
    curvature: float  # t - (v/e)^3; zero exactly when a_n = b_n
    delta: float

    def to_dict(self) -> dict:
        return asdict(self)


def theoretical_evt(p: DenseRegimeParams, n: int) -> TheoreticalEVT:
    """Closed-form occurrence probabilities (E, V, T), their combination
    t - (v/e)^3, and the noncentrality delta at sample size n."""
    m, k, l, w = p.m, p.k, p.l, p.mean_weight
    a1, b1 = p.probabilities(n)
    d = a1 - b1
    e = w ** m * (a1 + (k ** (m - 1) - 1) * b1) / k ** (m - 1)
    v = w ** (2 * (m - l)) * (
        d * d / k ** (2 * m - l - 1) + 2 * d * b1 / k ** (m - 1) + b1 * b1
    )
    t = w ** (3 * (m - 2 * l)) * (
        d ** 3 / k ** (3 * (m - l) - 1)
        + 3 * d * d * b1 / k ** (2 * m - l - 1)
        + 3 * d * b1 * b1 / k ** (m - 1)
        + b1 ** 3
    )
    if e <= 0:
        raise DegenerateE("hyperedge probability E must be positive")
    curv = t - (v / e) ** 3
    delta = sqrt(comb(n, 3 * (m - l)) * (m - l)) * curv / sqrt(t)
    return TheoreticalEVT(e=e, v=v, t=t, curvature=curv, delta=delta)


@dataclass(frozen=True)
class DenseTestReport:
    m: int
    l: int
    n: int
    e_hat: float
    v_hat: float
    t_hat: float
    statistic: float | None
    statistic_prime: float
    alpha: float
    z_crit: float
    reject: bool | None
    reject_prime: bool
    density_corrected: bool
    theoretical: TheoreticalEVT | None = None
    note: str = ""

    @property
    def delta(self) -> float | None:
        return self.theoretical.delta if self.theoretical else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta"] = self.delta
        return d


def dense_test(
    g: Hypergraph,
    l: int,
    alpha: float = 0.05,
    known_params: DenseRegimeParams | None = None,
    density_correction: bool = True,
) -> DenseTestReport:
    """Edge/vee/triangle test for one uniform layer at overlap ``l``.

    Computes both forms of the standardized statistic. The triangle-ratio
    form is undefined when no aligned triangles occur (reported as None);
    the square-root form is always available once the layer is nonempty.

    ``density_correction`` standardizes both statistics by the exact
    leading null standard deviation at the observed density: at a fixed
    hyperedge density p the raw statistics have null variance
    (1-p)^3 + A1 p^2 (1-p) + A2 p (1-p)^2 rather than 1 (the limit theory
    has p -> 0; the A terms are alignment-residual constants, zero for
    m = 2). The factor tends to 1 in the sparse limit, leaving every
    asymptotic statement unchanged.
    """
    ev = motifs.empirical_evt(g, l)
    m = g.uniform_size
    n = g.n
    if ev.e_hat <= 0.0:
        raise ZeroDensity("no hyperedges: dense statistics undefined")
    scale = sqrt(comb(n, 3 * (m - l)) * (m - l))
    corr = _null_sd_factor(n, m, l, ev.e_hat) if density_correction else 1.0
    ratio = ev.v_hat / ev.e_hat
    prime = 2.0 * scale * (sqrt(ev.t_hat) - ratio ** 1.5) / corr
    note = ""
    if ev.t_hat > 0.0:
        stat = scale * (ev.t_hat - ratio ** 3) / sqrt(ev.t_hat) / corr
    else:
        stat = None
        note = "no aligned triangles: ratio statistic undefined"
    z = normal_quantile(alpha)
    theo = theoretical_evt(known_params, n) if known_params is not None else None
    return DenseTestReport(
        m=m, l=l, n=n,
        e_hat=ev.e_hat, v_hat=ev.v_hat, t_hat=ev.t_hat,
        statistic=stat, statistic_prime=prime,
        alpha=alpha, z_crit=z,
        reject=None if stat is None else abs(stat) > z,
        reject_prime=abs(prime) > z,
        density_corrected=density_correction,
        theoretical=theo, note=note,
    )


@lru_cache(maxsize=64)
def _alignment_variance_constants(n: int, m: int, l: int) -> tuple[float, float] | None:
    """Exact degree-1/degree-2 null-variance constants of the raw dense
    statistics for the aligned placement family.

    At hyperedge density p the leading null variance of the raw statistic
    is (1-p)^3 + A1 p^2 (1-p) + A2 p (1-p)^2. For m = 2 both constants
    vanish (the placement family is edge-transitive). For m = 3, l = 1
    they follow from the aligned-placement incidence counts: A2 = 2n/5
    in closed form, A1 by summing the squared per-edge cancellation
    residual over all possible edges (closed-form counts per sorted-gap
    structure). Returns None when the constants are not implemented for
    (m, l) or the enumeration would be too heavy.
    """
    if m == 2 and l == 1:
        return 0.0, 0.0
    if m != 3 or l != 1 or n < 7 or n > 1200:
        return None
    d_tri = 2.0 * comb(n, 6)
    d_vee = 5.0 * comb(n, 5)
    c3 = comb(n, 3)
    a2 = 0.4 * n
    # per-edge aligned-placement counts from the gap structure
    # (w0, w1, w2, w3) of an edge {x < y < z}
    def c2(w):
        return w * (w - 1) / 2.0

    def c3f(w):
        return w * (w - 1) * (w - 2) / 6.0

    total = 0.0
    for x in range(n - 2):
        w0 = float(x)
        y = np.arange(x + 1, n - 1, dtype=np.float64)
        w1 = y - x - 1
        parts = []
        for yi, w1i in zip(y, w1):
            z = np.arange(yi + 1, n, dtype=np.float64)
            w2 = z - yi - 1
            w3 = n - 1 - z
            t1 = (
                c3f(w3) + c2(w0) * w3 + c3f(w1i)
                + w0 * c2(w3) + c3f(w0) + c3f(w2)
            )
            v1 = 2.0 * (c2(w3) + c2(w0) + w0 * w3 + c2(w1i) + c2(w2))
            r = t1 / d_tri - 3.0 * v1 / d_vee + 3.0 / c3
            parts.append(float((r * r).sum()))
        total += sum(parts)
    a1 = 2.0 * comb(n, 6) * total
    return a1, a2


def _null_sd_factor(n: int, m: int, l: int, e_hat: float) -> float:
    """Square root of the exact leading null variance of the raw dense
    statistics at density e_hat; falls back to (1-e)^{3/2} when the
    alignment constants are unavailable."""
    q = 1.0 - e_hat
    consts = _alignment_variance_constants(n, m, l)
    if consts is None:
        return q ** 1.5
    a1, a2 = consts
    return sqrt(q ** 3 + a1 * e_hat * e_hat * q + a2 * e_hat * q * q)


_WEIGHT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class CombinedTestReport:
    layer_ms: tuple[int, ...]
    layer_statistics: tuple[float, ...]
    weights: tuple[float, ...]
    statistic: float
    alpha: float
    z_crit: float
    reject: bool
    layer_deltas: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def combined_test(
    reports: list[DenseTestReport],
    weights: list[float] | None = None,
    alpha: float = 0.05,
    use_prime: bool = True,
) -> CombinedTestReport:
    """Weighted combination of per-layer statistics; weights must satisfy
    sum of squares equal to 1 (default: equal weights)."""
    if not reports:
        raise StatsError("need at least one layer report")
    vals = []
    for r in reports:
        v = r.statistic_prime if use_prime else r.statistic
        if v is None:
            raise ZeroDensity(f"layer m={r.m} has no usable statistic")
        vals.append(v)
    if weights is None:
        weights = [1.0 / sqrt(len(vals))] * len(vals)
    if len(weights) != len(vals):
        raise WeightNormViolation("one weight per layer required")
    norm = sum(c * c for c in weights)
    if abs(norm - 1.0) > _WEIGHT_NORM_TOL:
        raise WeightNormViolation(f"sum of squared weights is {norm}, not 1")
    stat = float(sum(c * v for c, v in zip(weights, vals)))
    z = normal_quantile(alpha)
    deltas = None
    if all(r.theoretical is not None for r in reports):
        deltas = tuple(r.theoretical.delta for r in reports)
    return CombinedTestReport(
        layer_ms=tuple(r.m for r in reports),
        layer_statistics=tuple(vals),
        weights=tuple(float(c) for c in weights),
        statistic=stat, alpha=alpha, z_crit=z, reject=abs(stat) > z,
        layer_deltas=deltas,
    )


def optimal_weights(deltas) -> np.ndarray:
    """Power-maximizing unit-norm weights: delta / ||delta||_2."""
    d = np.asarray(deltas, dtype=float)
    norm = float(np.sqrt((d * d).sum()))
    if norm == 0.0:
        raise AllZeroDeltas("all layer noncentralities are zero")
    return d / norm


# ---------------------------------------------------------------------------
# regime classification


@dataclass(frozen=True)
class RegimeVerdict:
    regime: str  # indistinguishable | bounded_degree | dense_testable | unknown_band
    verdict: str | None = None  # for bounded_degree: distinguishable | contiguous_band | unknown
    l: int | None = None  # for dense_testable
    kappa: float | None = None
    tau1: float | None = None
    tau2: float | None = None
    kappa_threshold: float | None = None

    def describe(self) -> str:
        if self.regime == "indistinguishable":
            return "indistinguishable (contiguous)"
        if self.regime == "bounded_degree":
            return {
                "distinguishable": "distinguishable",
                "contiguous_band": "contiguous band",
                "unknown": "unknown (between thresholds)",
            }[self.verdict]
        if self.regime == "dense_testable":
            return f"dense testable (l={self.l})"
        return "unknown band"

    def to_dict(self) -> dict:
        return asdict(self)


def regime_classify(
    m: int,
    k: int,
    alpha_exp: float,
    kappa: float | None = None,
    l_candidates: tuple[int, ...] | None = None,
) -> RegimeVerdict:
    """Classify detectability for hyperedge probabilities of order n^-alpha_exp.

    alpha_exp > m-1: always indistinguishable. alpha_exp = m-1: depends on
    the SNR kappa (required): above 1 distinguishable; below the
    contiguity threshold (with tau1 <= 1) indistinguishable; otherwise
    open. alpha_exp < m-1: testable when the density exponent falls in an
    admissible overlap band (l-1, l-2/3).
    """
    if alpha_exp <= 0:
        raise StatsError(f"density exponent must be positive, got {alpha_exp}")
    if m < 2 or k < 2:
        raise InvalidOrder(f"need m, k >= 2, got m={m}, k={k}")
    if alpha_exp > m - 1:
        return RegimeVerdict(regime="indistinguishable")
    if alpha_exp == m - 1:
        if kappa is None:
            raise MissingKappa("bounded-degree regime requires kappa")
        tau1 = tau2 = thr = None
        if m >= 3:
            tau1, tau2 = contiguity_constants(m, k)
            thr = 1.0 / (tau2 * (k * k - 1))
        if kappa > 1:
            verdict = "distinguishable"
        elif m >= 3 and tau1 <= 1 and kappa < thr:
            verdict = "contiguous_band"
        elif m == 2 and k == 2 and kappa < 1:
            # the classical two-block graph threshold is sharp
            verdict = "contiguous_band"
        else:
            verdict = "unknown"
        return RegimeVerdict(
            regime="bounded_degree", verdict=verdict, kappa=kappa,
            tau1=tau1, tau2=tau2, kappa_threshold=thr,
        )
    # dense: rate exponent of a_n is m-1-alpha_exp
    exponent = (m - 1) - alpha_exp
    if l_candidates is None:
        l_candidates = tuple(range(1, m // 2 + 1))
    for l in l_candidates:
        if l - 1 < exponent < l - 2.0 / 3.0:
            return RegimeVerdict(regime="dense_testable", l=l)
    return RegimeVerdict(regime="unknown_band")


def normal_quantile(alpha: float) -> float:
    """Two-sided critical value: the (1 - alpha/2) standard normal quantile."""
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must be in (0, 1), got {alpha}")
    return NormalDist().inv_cdf(1.0 - alpha / 2.0)


def suggest_overlap(e_hat: float, n: int, m: int) -> int | None:
    """Overlap index whose admissible density band contains the observed
    hyperedge proportion (rate proxy e_hat * n^(m-1)); None when no band
    fits."""
    if e_hat <= 0:
        return None
    rate = e_hat * float(n) ** (m - 1)
    for l in range(1, m // 2 + 1):
        if float(n) ** (l - 1) < rate < float(n) ** (l - 2.0 / 3.0):
            return l
    return None
