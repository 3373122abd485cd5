"""Almost-periodic Taylor series f(z) = sum_{n>=1} g(n alpha) z^n.

Two representations are kept deliberately independent so they can check each
other: straight partial sums inside the disc, and the pole sum
sum_k c_k w_k z / (1 - w_k z) with w_k = e^{2 pi i k alpha}, which also
continues f outside the unit circle.  Radial probes along rays of angle
2 pi j alpha exhibit the divergent c_{-j}/(1-t) term that blocks analytic
continuation; for the real symmetric analytic family used by the probes
this coefficient equals c_j.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .diophantine import AlphaSpec, PHASE_BITS, RationalAlphaSpec
from .errors import (DomainError, EmptyMask, NearPole, PoleAtRootOfUnity,
                     RationalAlpha, ZeroTargetCoefficient)
from .lerch import SeriesValue
from .periodic import PeriodicFunction, make_trig_poly

_MASK = (1 << PHASE_BITS) - 1
_INV = 0.5 ** PHASE_BITS

NEAR_POLE_DISTANCE = 1e-8


def taylor_eval(g: PeriodicFunction, alpha: AlphaSpec, z: complex,
                tol: float = 1e-10) -> SeriesValue:
    """Partial sums with the geometric tail bound sup|g| |z|^{N+1}/(1-|z|)."""
    z = complex(z)
    r = abs(z)
    if r >= 1:
        raise DomainError("taylor_eval needs |z| < 1", abs_z=r)
    if z == 0:
        return SeriesValue(0j, 0.0, "taylor_partial", terms_used=0)
    sup = g.sup_norm if g.sup_norm is not None else 1.0
    N = max(8, int(math.ceil((math.log(tol * (1 - r) / sup) / math.log(r)))))
    fixed = alpha.phase_fixed()
    total = 0j
    zp = 1.0 + 0j
    acc = 0
    for n in range(1, N + 1):
        acc = (acc + fixed) & _MASK
        zp *= z
        total += complex(g.evaluator(acc * _INV)) * zp
    tail = sup * r ** (N + 1) / (1 - r)
    return SeriesValue(total, tail + 1e-15 * N * abs(total),
                       "taylor_partial", terms_used=N)


def pole_sum_eval(g: PeriodicFunction, alpha: AlphaSpec, z: complex,
                  K: int | None = None, tol: float = 1e-10) -> SeriesValue:
    """f(z) = sum_k c_k w_k z / (1 - w_k z), valid inside and outside |z|=1.

    Raises NearPole when z comes within 1e-8 of a retained pole e^{-2 pi i
    k alpha}.  The mode tail is controlled by the distance ||z|-1| unless g
    is a trig polynomial (no tail at all).
    """
    z = complex(z)
    if g.decay_class.kind not in ("finite", "analytic"):
        raise DomainError("pole sum needs finite or analytic coefficients",
                          decay=str(g.decay_class))
    if K is None:
        if g.decay_class.kind == "finite":
            K = max(abs(k) for k in g.support)
        else:
            delta = g.decay_class.param
            floor_t = abs(abs(z) - 1.0)
            K = 40
            while 2 * math.exp(-delta * (K + 1)) / (1 - math.exp(-delta)) \
                    * max(abs(z), 1.0) / max(floor_t, 1e-300) > tol and K < 6000:
                K = int(K * 1.5)
    fixed = alpha.phase_fixed()
    total = 0j
    mindist = math.inf
    for k in range(-K, K + 1):
        ck = g.coeff(k)
        if ck == 0:
            continue
        w = cmath.exp(2j * math.pi * (((k * fixed) & _MASK) * _INV))
        den = 1.0 - w * z
        dist = abs(den)          # = |z - w^{-1}| since |w| = 1
        mindist = min(mindist, dist)
        if dist < NEAR_POLE_DISTANCE:
            raise NearPole("z within 1e-8 of a retained pole",
                           k=k, distance=dist)
        total += ck * w * z / den
    if g.decay_class.kind == "finite":
        tail = 0.0
    else:
        floor_t = abs(abs(z) - 1.0)
        if floor_t == 0.0:
            raise DomainError("pole-sum tail needs |z| != 1 for infinite "
                              "coefficient families", abs_z=abs(z))
        tail = g.coeff_abs_tail(K) * abs(z) / floor_t
    return SeriesValue(total, tail + 1e-15 * (2 * K + 1) / max(mindist, 1e-15),
                       "pole_sum", terms_used=2 * K + 1)


@dataclass(frozen=True)
class ProbeReport:
    j: int
    t_values: tuple[float, ...]
    scaled: tuple[complex, ...]          # (1 - t) f(t e^{2 pi i j alpha})
    limit_estimate: complex
    target: complex                      # c_j
    deviation: float                     # |limit_estimate - target|


def radial_probe(g: PeriodicFunction, alpha: AlphaSpec, j: int,
                 m_max: int = 20) -> ProbeReport:
    """Scaled radial limits (1-t) f(t e^{2 pi i j alpha}) at t = 1 - 2^{-m}.

    The pole-sum term with k = -j contributes c_{-j} t/(1-t); the scaled
    values converge to that coefficient (equal to c_j for the real even
    analytic family this probe requires).
    """
    if g.decay_class.kind != "analytic":
        raise DomainError("radial probe expects analytic-decay g",
                          decay=str(g.decay_class))
    target = complex(g.coeff(j))
    if target == 0:
        raise ZeroTargetCoefficient("c_j = 0 along the probe ray", j=j)
    if isinstance(alpha, RationalAlphaSpec):
        raise RationalAlpha("radial probe needs irrational alpha")
    fixed = alpha.phase_fixed()
    ray = cmath.exp(2j * math.pi * (((j * fixed) & _MASK) * _INV))
    ts, scaled = [], []
    for m in range(4, m_max + 1):
        t = 1.0 - 2.0 ** -m
        z = t * ray
        val = pole_sum_eval(g, alpha, z, tol=1e-9).value
        ts.append(t)
        scaled.append((1.0 - t) * val)
    limit = scaled[-1]
    return ProbeReport(j, tuple(ts), tuple(scaled), limit, target,
                       abs(limit - target))


def rational_taylor(g: PeriodicFunction, p: int, q: int,
                    z: complex) -> SeriesValue:
    """f(z) = h(z)/(1 - z^q) with h(z) = sum_{n=1}^q g(n p/q) z^n."""
    if q < 1:
        raise DomainError("q must be positive", q=q)
    z = complex(z)
    zq = z ** q
    if abs(zq - 1.0) < 1e-12:
        raise PoleAtRootOfUnity("z^q = 1", q=q, z=str(z))
    h = 0j
    zp = 1.0 + 0j
    for n in range(1, q + 1):
        zp *= z
        h += complex(g.evaluator((n * p % q) / q)) * zp
    val = h / (1.0 - zq)
    return SeriesValue(val, 1e-15 * (q + 1) * (abs(h) + abs(val)),
                       "rational_closed_form", terms_used=q)


def masked_series(alpha: AlphaSpec, arcs: Sequence[tuple[float, float]],
                  K: int) -> PeriodicFunction:
    """Coefficients c_k = 1/|k|! masked to zero wherever e^{2 pi i k alpha}
    lands on one of the closed arcs; |k| <= K.

    Arc membership is decided by exact comparison of the 128-bit fixed-point
    phase of k alpha against the (binary float, hence exact rational) arc
    endpoints; arcs may wrap through phase 0.
    """
    if isinstance(alpha, RationalAlphaSpec):
        raise RationalAlpha("masked construction needs irrational alpha")
    fixed = alpha.phase_fixed()
    one = Fraction(1)

    def in_arcs(phase: Fraction) -> bool:
        for lo, hi in arcs:
            flo, fhi = Fraction(lo) % one, Fraction(hi) % one
            if flo <= fhi:
                if flo <= phase <= fhi:
                    return True
            else:                      # wraps through 0
                if phase >= flo or phase <= fhi:
                    return True
        return False

    table: dict[int, complex] = {}
    for k in range(-K, K + 1):
        phase = Fraction((k * fixed) % (1 << PHASE_BITS), 1 << PHASE_BITS)
        if in_arcs(phase):
            continue
        table[k] = complex(1.0 / math.factorial(abs(k)))
    if not table:
        raise EmptyMask("every coefficient up to K is masked", K=K)
    # masking k and -k independently can break real symmetry, so let the
    # constructor detect it rather than declaring it
    return make_trig_poly(table)
