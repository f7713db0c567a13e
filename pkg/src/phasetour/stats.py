"""Cost-population summaries, Q-Q data and the NN-vs-sample Z framework."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateData, InvalidArgument

SQRT1_2 = math.sqrt(0.5)


@dataclass
class Moments:
    n: int
    mean: float
    std: float
    min: float
    max: float

    def to_dict(self):
        return asdict(self)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray


@dataclass
class QQSeries:
    theoretical: np.ndarray
    sample: np.ndarray
    correlation: float

    @property
    def points(self):
        return np.column_stack([self.theoretical, self.sample])


@dataclass
class ZReport:
    z: float
    z_prime: float
    z_double_prime: float
    p_c: float = math.nan
    p_ln: float = math.nan
    n: int = 0
    # 1 - CDF(z), the orientation as literally printed; reported, not used
    p_c_upper: float = math.nan

    def to_dict(self):
        return asdict(self)


def _as_costs(costs):
    x = np.asarray(costs, dtype=float).ravel()
    if x.size == 0:
        raise InvalidArgument("empty cost population")
    return x


def summarize(costs) -> Moments:
    """Population moments (std divides by n)."""
    x = _as_costs(costs)
    lo, hi = float(x.min()), float(x.max())
    mean = min(max(float(x.mean()), lo), hi)
    return Moments(int(x.size), mean, float(x.std()), lo, hi)


def histogram(costs, bins: int = 50) -> Histogram:
    if bins < 1:
        raise InvalidArgument("bins must be >= 1")
    counts, edges = np.histogram(_as_costs(costs), bins=bins)
    return Histogram(edges, counts)


def normal_cdf(z):
    if np.ndim(z) == 0:
        return 0.5 * math.erfc(-float(z) * SQRT1_2)
    return np.vectorize(lambda v: 0.5 * math.erfc(-v * SQRT1_2), otypes=[float])(z)


# Wichura (1988), algorithm AS 241 (PPND16): relative accuracy about 1e-16.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def normal_quantile(p):
    scalar = np.ndim(p) == 0
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(~((p > 0) & (p < 1))):
        raise InvalidArgument("quantile probability must lie strictly inside (0, 1)")
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _poly(_A, r) / _poly(_B, r)

    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.sqrt(-np.log(np.where(qt < 0, p[tail], 1.0 - p[tail])))
        near = r <= 5.0
        x = np.where(
            near,
            _poly(_C, r - 1.6) / _poly(_D, r - 1.6),
            _poly(_E, r - 5.0) / _poly(_F, r - 5.0),
        )
        out[tail] = np.where(qt < 0, -x, x)
    return float(out[0]) if scalar else out


def plotting_positions(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def qq_data(costs) -> QQSeries:
    x = _as_costs(costs)
    if x.size < 3:
        raise InvalidArgument("Q-Q data needs at least 3 values")
    sd = x.std()
    if sd == 0:
        raise DegenerateData("cost population has zero spread")
    sample = np.sort((x - x.mean()) / sd)
    theoretical = normal_quantile(plotting_positions(x.size))
    r = float(np.corrcoef(theoretical, sample)[0, 1])
    return QQSeries(theoretical, sample, max(-1.0, min(1.0, r)))


def z_scores(nn: Moments, sample: Moments) -> ZReport:
    if not sample.std > 0:
        raise DegenerateData("sample standard deviation is zero")
    s = sample.std
    return ZReport(
        z=(nn.mean - sample.mean) / s,
        z_prime=(nn.min - sample.min) / s,
        z_double_prime=(nn.max - sample.min) / s,
    )


def p_lower_n(z: float, n: int):
    """(p_c, p_ln): chance one random path lands below ``z``, and that at
    least one of ``n`` independent paths does."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    p_c = normal_cdf(z)
    if n == 1:
        return p_c, p_c
    if p_c >= 1.0:
        return p_c, 1.0
    # 1 - (1 - p)^n without cancellation for tiny p
    p_ln = -math.expm1(n * math.log1p(-p_c))
    return p_c, min(1.0, max(p_ln, p_c))


def compare(nn_costs, sample_costs, n: int | None = None) -> ZReport:
    """Full Z report of an NN population against a random-sample population.

    ``n`` (tries for p_ln) defaults to the sample size.
    """
    nn = summarize(nn_costs)
    samp = summarize(sample_costs)
    rep = z_scores(nn, samp)
    rep.n = int(n if n is not None else samp.n)
    rep.p_c, rep.p_ln = p_lower_n(rep.z, rep.n)
    rep.p_c_upper = 0.5 * math.erfc(rep.z * SQRT1_2)
    return rep
