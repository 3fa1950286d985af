"""Iterative decoding thresholds over the binary-input AWGN channel.

Protograph density evolution is approximated one-dimensionally: every
message is the mean of a consistent Gaussian LLR density (an SNR-like
reliability).  Variable nodes add reliabilities; check nodes combine them
through the dual map R with C(R(x)) = 1 - C(x), where C(mu) is the
capacity of a binary-input AWGN channel whose LLR density is N(mu, 2*mu).
C and its inverse are tabulated once by Gauss-Hermite quadrature and
interpolated with monotone cubics.

Punctured variable nodes start with zero channel reliability.  The channel
reliability of a transmitted node at Eb/N0 = rho (linear) is 4 * R * rho
for design rate R (energy per information bit spread over the transmitted
symbols only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .protomatrix import Protomatrix, RatePoint, prefix, rate

LN2 = math.log(2.0)

# A consistent-Gaussian LLR mean of 99 puts the bit error probability
# Q(sqrt(mu/2)) below 1e-12; all variable posteriors must exceed this.
CONVERGENCE_METRIC = 99.0

# Reliability clamps: table domain and the stand-in for "no information" /
# "perfect information" outside it.  The dual map is a faithful involution
# on roughly [1e-13, 300]; beyond that it saturates monotonically, far past
# the convergence cap, so threshold dynamics are unaffected.
MU_LO = 1e-16
MU_HI = 600.0
R_CAP = 1e9
S_CLAMP = 1e12

DEFAULT_MAX_ITER = 1000
DEFAULT_TOL_DB = 0.01
DEFAULT_BRACKET = (-2.0, 10.0)
_BRACKET_FLOOR = -6.0

_STALL_EPS = 1e-12


@dataclass(frozen=True)
class ThresholdResult:
    eb_n0_db: float  # math.inf when not converged
    converged: bool
    iterations_used: int


class _Inverse:
    """Monotone inverse of tabulated log-values, queries clipped to range."""

    def __init__(self, logval: np.ndarray, logmu: np.ndarray):
        order = np.argsort(logval)
        self.x = logval[order]
        self.lo, self.hi = self.x[0], self.x[-1]
        self.f = PchipInterpolator(self.x, logmu[order])

    def __call__(self, q: np.ndarray) -> np.ndarray:
        return self.f(np.clip(q, self.lo, self.hi))


@lru_cache(maxsize=1)
def _tables():
    nodes, weights = np.polynomial.hermite.hermgauss(256)
    weights = weights / math.sqrt(math.pi)
    mu = np.logspace(math.log10(MU_LO), math.log10(MU_HI), 20000)
    z = mu[:, None] + 2.0 * np.sqrt(mu)[:, None] * nodes[None, :]
    # complementary capacity Cc = E[log2(1 + exp(-z))], stable as Cc -> 0
    cc = ((np.logaddexp(0.0, z) - z) @ weights) / LN2
    # capacity C = E[log2(1 + tanh(z/2))], stable as C -> 0
    with np.errstate(divide="ignore"):
        integ = np.where(z < -30.0, LN2 + z, np.log1p(np.tanh(z / 2.0)))
    c = (integ @ weights) / LN2
    logmu = np.log(mu)
    fwd_c = PchipInterpolator(logmu, np.log(c), extrapolate=False)
    fwd_cc = PchipInterpolator(logmu, np.log(cc), extrapolate=False)
    # Each curve is inverted only where it is small: near 1 the tabulated
    # values collapse within float spacing and would be noise-dominated.
    keep_c = c <= 0.6
    keep_cc = cc <= 0.6
    inv_c = _Inverse(np.log(c[keep_c]), logmu[keep_c])
    inv_cc = _Inverse(np.log(cc[keep_cc]), logmu[keep_cc])
    return fwd_c, fwd_cc, inv_c, inv_cc


def capacity(mu) -> np.ndarray:
    """BI-AWGN capacity for a consistent Gaussian LLR density of mean mu."""
    fwd_c, _, _, _ = _tables()
    mu = np.asarray(mu, dtype=float)
    out = np.empty_like(mu)
    lo = mu <= MU_LO
    hi = mu >= MU_HI
    mid = ~lo & ~hi
    out[lo] = 0.0
    out[hi] = 1.0
    out[mid] = np.exp(fwd_c(np.log(mu[mid])))
    return out


def reciprocal(s) -> np.ndarray:
    """Dual reliability map: C(reciprocal(s)) = 1 - C(s).

    An involution on (0, inf); zero reliability maps to the cap R_CAP
    (perfect information) and vice versa.  The target C(r) = Cc(s) is
    resolved on whichever of the two capacity branches is small there.
    """
    fwd_c, fwd_cc, inv_c, inv_cc = _tables()
    s = np.clip(np.asarray(s, dtype=float), 0.0, S_CLAMP)
    out = np.empty_like(s)
    lo = s <= MU_LO
    hi = s >= MU_HI
    mid = ~lo & ~hi
    out[lo] = R_CAP
    out[hi] = 0.0
    if mid.any():
        logs = np.log(s[mid])
        a = fwd_c(logs)  # log C(s) = log Cc(r)
        b = fwd_cc(logs)  # log Cc(s) = log C(r)
        r = np.where(b <= -LN2, np.exp(inv_c(b)), np.exp(inv_cc(a)))
        out[mid] = r
    return out


def channel_reliability(p: Protomatrix, eb_n0_db: float) -> np.ndarray:
    """Per-variable-node channel LLR means at the given Eb/N0."""
    if not math.isfinite(eb_n0_db):
        raise ValueError(f"Eb/N0 must be finite, got {eb_n0_db}")
    rho = 10.0 ** (eb_n0_db / 10.0)
    mu = 4.0 * float(rate(p)) * rho
    ch = np.full(p.n_v, mu)
    for col in p.punctured:
        ch[col - 1] = 0.0
    return ch


def _rca_run(p: Protomatrix, eb_n0_db: float, max_iter: int) -> tuple[bool, int]:
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    m = p.entries.astype(float)
    if (m.sum(axis=0) == 0).any():
        raise ValueError("degree-0 variable node")
    ch = channel_reliability(p, eb_n0_db)
    s_cv = np.zeros_like(m)
    for it in range(1, max_iter + 1):
        col_in = (m * s_cv).sum(axis=0)
        s_vc = np.clip(ch[None, :] + col_in[None, :] - s_cv, 0.0, S_CLAMP)
        r_vc = reciprocal(s_vc)
        row_in = (m * r_vc).sum(axis=1)
        arg = np.clip(row_in[:, None] - r_vc, 0.0, None)
        new_cv = reciprocal(arg)
        posterior = ch + (m * new_cv).sum(axis=0)
        if posterior.min() >= CONVERGENCE_METRIC:
            return True, it
        # Messages grow monotonically, so a numerical fixed point below the
        # convergence cap cannot converge later.
        if np.abs(new_cv - s_cv).max() <= _STALL_EPS * (1.0 + np.abs(new_cv).max()):
            return False, it
        s_cv = new_cv
    return False, max_iter


def rca_converges(
    p: Protomatrix, eb_n0_db: float, max_iter: int = DEFAULT_MAX_ITER
) -> bool:
    """True if density evolution drives every node's error rate to zero."""
    ok, _ = _rca_run(p, eb_n0_db, max_iter)
    return ok


def threshold(
    p: Protomatrix,
    tol_db: float = DEFAULT_TOL_DB,
    max_iter: int = DEFAULT_MAX_ITER,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
) -> ThresholdResult:
    """Decoding threshold in Eb/N0 by bisection, upper bracket end returned.

    Not converging at the top of the bracket is reported with
    converged=False and an infinite threshold, never raised.
    """
    if tol_db <= 0:
        raise ValueError("tol_db must be positive")
    lo, hi = bracket
    ok_hi, it_hi = _rca_run(p, hi, max_iter)
    if not ok_hi:
        return ThresholdResult(math.inf, False, it_hi)
    while lo > _BRACKET_FLOOR and _rca_run(p, lo, max_iter)[0]:
        hi = lo
        lo -= 2.0
    best_it = it_hi
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        ok, it = _rca_run(p, mid, max_iter)
        if ok:
            hi, best_it = mid, it
        else:
            lo = mid
    return ThresholdResult(hi, True, best_it)


def threshold_profile(
    p: Protomatrix,
    tol_db: float = DEFAULT_TOL_DB,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[tuple[RatePoint, ThresholdResult]]:
    """(rate, threshold) for every rate-compatible prefix."""
    if p.hrc_shape is None:
        raise ValueError("threshold_profile requires raptor-like structure")
    out = []
    for rows in range(p.hrc_shape[0], p.n_c + 1):
        q = prefix(p, rows)
        out.append((rate(q), threshold(q, tol_db=tol_db, max_iter=max_iter)))
    return out


def shannon_limit_db(r: Fraction | float, tol_db: float = 1e-3) -> float:
    """Smallest Eb/N0 at which BI-AWGN capacity reaches the code rate."""
    r = float(r)
    if not 0 < r < 1:
        raise ValueError("rate must be in (0, 1)")
    lo, hi = -20.0, 20.0
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        c = float(capacity(np.array([4.0 * r * 10 ** (mid / 10.0)])))
        if c >= r:
            hi = mid
        else:
            lo = mid
    return hi
