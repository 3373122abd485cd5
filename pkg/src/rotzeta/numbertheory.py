"""Divisor sums, the nested-series commutation identity, and the Parseval
ratio check.

T(g)(s) = sum_n g(n alpha)/n^s applied twice gives the double series
sum_{m,n} g(mn alpha)/(n^s m^t), which collapses to the single sum
sum_k sigma_{t-s}(k)/k^t g(k alpha).  Both forms are implemented
independently; the box-truncated double sum and the sieve-driven single sum
are the two sides every identity test compares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import config
from .diophantine import AlphaSpec, PHASE_BITS
from .errors import DomainError
from .lerch import SeriesValue, hurwitz_zeta
from .periodic import PeriodicFunction

_MASK = (1 << PHASE_BITS) - 1
_INV = 0.5 ** PHASE_BITS


# ---------------------------------------------------------------------------
# factorisation and sigma_t
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _prime_table(limit: int = 1_000_000) -> tuple[int, ...]:
    sieve = bytearray(b"\x01") * (limit + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:: p] = b"\x00" * ((limit - start) // p + 1)
    return tuple(i for i, v in enumerate(sieve) if v)


@dataclass(frozen=True)
class FactoredInteger:
    n: int
    factors: tuple[tuple[int, int], ...]     # (prime, exponent), increasing


def factorize(n: int) -> FactoredInteger:
    """Trial division against a 10^6 prime table; covers n <= 10^12."""
    if n < 1:
        raise DomainError("factorize needs n >= 1", n=n)
    if n > 10 ** 12:
        raise DomainError("factorize supports n <= 10^12", n=n)
    rem = n
    out = []
    for p in _prime_table():
        if p * p > rem:
            break
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            out.append((p, e))
    if rem > 1:
        out.append((rem, 1))
    return FactoredInteger(n, tuple(out))


def divisor_sigma(t: complex, k: int) -> complex:
    """sigma_t(k) = sum_{m | k} m^t, exactly multiplicative over the
    factorisation."""
    fk = factorize(k)
    total = 1 + 0j
    for p, e in fk.factors:
        pt = complex(p) ** t
        total *= sum(pt ** i for i in range(e + 1))
    if complex(t).imag == 0:
        total = complex(total.real, 0.0)
    return total


def _sigma_sieve(t_minus_s: complex, M: int) -> np.ndarray:
    """sigma_{t-s}(k) for k = 1..M by divisor sieve."""
    sig = np.zeros(M + 1, dtype=complex)
    for d in range(1, M + 1):
        sig[d::d] += complex(d) ** t_minus_s
    return sig


def _phases(alpha: AlphaSpec, n_max: int) -> np.ndarray:
    fixed = alpha.phase_fixed()
    out = np.empty(n_max)
    acc = 0
    for n in range(n_max):
        acc = (acc + fixed) & _MASK
        out[n] = acc * _INV
    return out


def _g_on_phases(g: PeriodicFunction, x: np.ndarray) -> np.ndarray:
    if g.evaluator_np is not None:
        return np.asarray(g.evaluator_np(x), dtype=complex)
    return np.array([complex(g.evaluator(float(v))) for v in x])


# ---------------------------------------------------------------------------
# nested series
# ---------------------------------------------------------------------------

def _zeta_tail(sigma: float, N: int) -> float:
    return N ** (1 - sigma) / (sigma - 1)


def _zeta_full(sigma: float) -> float:
    n = np.arange(1, 2001, dtype=np.float64)
    return float(np.sum(n ** -sigma) + _zeta_tail(sigma, 2000))


def nested_T(g: PeriodicFunction, alpha: AlphaSpec, s: complex, t: complex,
             N: int, truncation: str = "box") -> SeriesValue:
    """Double sum of g(m n alpha)/(n^s m^t).

    truncation="box" sums m <= N, n <= N (with a zeta-product tail bound);
    "hyperbola" sums mn <= N, which covers exactly the same terms as the
    single divisor sum with cap N.
    """
    s, t = complex(s), complex(t)
    if s.real <= 1 or t.real <= 1:
        raise DomainError("nested series need Re(s) > 1 and Re(t) > 1",
                          s=str(s), t=str(t))
    if truncation not in ("box", "hyperbola"):
        raise DomainError("truncation must be box or hyperbola",
                          truncation=truncation)
    fixed = alpha.phase_fixed()
    sup = g.sup_norm if g.sup_norm is not None else 1.0
    total = 0j
    if truncation == "box":
        n_arr = np.arange(1, N + 1, dtype=np.float64)
        ns_pow = n_arr ** (-s)
        for m in range(1, N + 1):
            beta = ((m * fixed) & _MASK) * _INV
            ph = (n_arr * beta) % 1.0
            vals = _g_on_phases(g, ph)
            total += complex(np.sum(vals * ns_pow)) * m ** (-t)
        tail = sup * (_zeta_full(s.real) * _zeta_tail(t.real, N)
                      + _zeta_full(t.real) * _zeta_tail(s.real, N))
    else:
        for m in range(1, N + 1):
            top = N // m
            if top == 0:
                break
            beta = ((m * fixed) & _MASK) * _INV
            n_arr = np.arange(1, top + 1, dtype=np.float64)
            ph = (n_arr * beta) % 1.0
            vals = _g_on_phases(g, ph)
            total += complex(np.sum(vals * n_arr ** (-s))) * m ** (-t)
        # same covered set as the single sum; tail bounded by the divisor sum
        tail = _divisor_series_tail(s, t, N) * sup
    if g.is_real and s.imag == 0 and t.imag == 0:
        total = complex(total.real, 0.0)
    return SeriesValue(total, tail, f"nested_double_{truncation}",
                       terms_used=N)


def _divisor_series_tail(s: complex, t: complex, M: int) -> float:
    """Tail of sum_k sigma_{t-s}(k)/k^t g(k alpha) beyond M, via
    sigma_{t-s}(k) <= k^{max(0, Re(t-s))} d(k) and d(k) <= 3.53 k^{1/3}."""
    w = max(0.0, (t - s).real)
    expo = t.real - w - 1.0 / 3.0
    if expo <= 1:
        raise DomainError("divisor tail diverges at these exponents",
                          s=str(s), t=str(t))
    return config.DIVISOR_CUBE_ROOT_BOUND * M ** (1 - expo) / (expo - 1)


def nested_single_sum(g: PeriodicFunction, alpha: AlphaSpec, s: complex,
                      t: complex, M: int) -> SeriesValue:
    """sum_{k<=M} sigma_{t-s}(k)/k^t g(k alpha) with the divisor-bound tail."""
    s, t = complex(s), complex(t)
    if s.real <= 1 or t.real <= 1:
        raise DomainError("nested series need Re(s) > 1 and Re(t) > 1",
                          s=str(s), t=str(t))
    sig = _sigma_sieve(t - s, M)
    k = np.arange(1, M + 1, dtype=np.float64)
    x = _phases(alpha, M)
    vals = _g_on_phases(g, x)
    total = complex(np.sum(sig[1:] * k ** (-t) * vals))
    sup = g.sup_norm if g.sup_norm is not None else 1.0
    tail = _divisor_series_tail(s, t, M) * sup
    if g.is_real and s.imag == 0 and t.imag == 0:
        total = complex(total.real, 0.0)
    return SeriesValue(total, tail, "nested_single", terms_used=M)


# ---------------------------------------------------------------------------
# Parseval / Ramanujan ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParsevalRecord:
    integral: complex
    zeta_ratio: complex
    convention_factor: float
    ratio: complex                      # integral / zeta_ratio


def parseval_ratio(s: complex, t: complex, u: complex, v: complex,
                   K: int = 20_000) -> ParsevalRecord:
    """Both sides of the Parseval/Ramanujan identity for the sine base.

    integral = convention_factor * sum_k [sigma_{t-s}(k)/k^t][sigma_{v-u}(k)/k^v]
    zeta_ratio = zeta(s+u) zeta(s+v) zeta(t+u) zeta(t+v) / zeta(s+t+u+v)

    The convention factor is the measured sine-mode normalisation from
    config (1/2), asserted once against the quadrature oracle in the tests.
    """
    s, t, u, v = (complex(w) for w in (s, t, u, v))
    for pair in (s + u, s + v, t + u, t + v, s + t + u + v):
        if pair.real <= 1:
            raise DomainError("parseval needs all pairwise exponents > 1",
                              offending=str(pair))
    sig1 = _sigma_sieve(t - s, K)
    sig2 = _sigma_sieve(v - u, K)
    k = np.arange(1, K + 1, dtype=np.float64)
    csum = complex(np.sum(sig1[1:] * k ** (-t) * sig2[1:] * k ** (-v)))
    integral = config.PARSEVAL_CONVENTION_FACTOR * csum

    def zeta1(w: complex) -> complex:
        return hurwitz_zeta(w, 1.0).value

    ratio_rhs = (zeta1(s + u) * zeta1(s + v) * zeta1(t + u) * zeta1(t + v)
                 / zeta1(s + t + u + v))
    return ParsevalRecord(integral, ratio_rhs,
                          config.PARSEVAL_CONVENTION_FACTOR,
                          integral / ratio_rhs)


def parseval_integral_oracle(s: complex, t: complex, u: complex, v: complex,
                             K: int = 2000, grid: int = 8192) -> complex:
    """Quadrature oracle: int_0^1 f_{s,t} f_{u,v} d alpha by the periodic
    trapezoid rule on truncated sine series (exact for trig polynomials once
    grid > 2K)."""
    alphas = (np.arange(grid) + 0.5) / grid
    k = np.arange(1, K + 1, dtype=np.float64)
    b1 = np.real(_sigma_sieve(t - s, K)[1:]) / k ** np.real(t)
    b2 = np.real(_sigma_sieve(v - u, K)[1:]) / k ** np.real(v)
    sines = np.sin(2 * np.pi * np.outer(alphas, k))
    f1 = sines @ b1
    f2 = sines @ b2
    return complex(np.mean(f1 * f2))


# ---------------------------------------------------------------------------
# divisor-series graph sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphSample:
    alpha: float
    value: float
    heuristic: bool


def h_alpha_sample(s: complex, t: complex, grid: int,
                   n_terms: int = 100_000) -> list[GraphSample]:
    """Samples of sum_k sigma_{t-s}(k)/k^t sin(2 pi k alpha) on a uniform
    alpha grid.

    Convergent cases (Re t - max(0, Re(t-s)) > 1) are summed directly; the
    s = t = 1 divisor case d(n)/n uses Cesaro-regularised truncation and is
    flagged heuristic (no error claim).
    """
    s, t = complex(s), complex(t)
    w = max(0.0, (t - s).real)
    heuristic = (t.real - w) <= 1.0
    K = n_terms
    k = np.arange(1, K + 1, dtype=np.float64)
    coef = np.real(_sigma_sieve(t - s, K)[1:]) * k ** (-t.real)
    if heuristic:
        coef = coef * (1.0 - k / (K + 1.0))        # Cesaro weights
    out = []
    for i in range(grid):
        a = i / grid
        val = float(np.sum(coef * np.sin(2 * np.pi * ((k * a) % 1.0))))
        out.append(GraphSample(a, val, heuristic))
    return out
