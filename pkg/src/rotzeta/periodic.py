"""1-periodic function models with Fourier coefficient rules.

A PeriodicFunction bundles a coefficient rule c_k, an optional closed-form
evaluator (scalar and numpy-vectorised), the total variation when known, and
a decay class that downstream truncation decisions key on.  The coboundary
transfer h with g(x) = h(x+alpha) - h(x) divides each coefficient by
e^{2 pi i k alpha} - 1 using exact fixed-point phases.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .diophantine import (AlphaSpec, DiophantineEstimate, PHASE_BITS,
                          RationalAlphaSpec, cf_expand,
                          diophantine_type_estimate)
from .errors import (DomainError, EmptyCoefficients, EvaluationAtSingularity,
                     NonzeroMean, RationalAlpha, SmallDivisorOverflow,
                     ToleranceUnreachable)

TWO_PI = 2.0 * math.pi
_PHASE_INV = 0.5 ** PHASE_BITS


@dataclass(frozen=True)
class DecayClass:
    kind: str                       # finite | power | analytic | log_singular
    param: Optional[float] = None   # t for power, delta for analytic

    def __str__(self) -> str:
        return self.kind if self.param is None else f"{self.kind}({self.param})"


@dataclass(frozen=True)
class PeriodicFunction:
    label: str
    coeff: Callable[[int], complex]
    mean: complex
    decay_class: DecayClass
    is_real: bool
    variation: Optional[float] = None
    evaluator: Optional[Callable[[float], float]] = None      # scalar closed form
    evaluator_np: Optional[Callable[[np.ndarray], np.ndarray]] = None
    evaluator_with_tol: Optional[Callable[[float, float], float]] = None
    support: Optional[tuple[int, ...]] = None                 # finite case
    sup_norm: Optional[float] = None

    def coeff_abs_tail(self, K: int) -> float:
        """Upper bound for sum_{|k|>K} |c_k| from the decay class."""
        dc = self.decay_class
        if dc.kind == "finite":
            return 0.0
        if dc.kind == "power" and dc.param > 1:
            t = dc.param
            return K ** (1 - t) / (t - 1)  # |c_k| <= 1/(2 k^t), both signs
        if dc.kind == "analytic":
            d = dc.param
            return 2 * math.exp(-d * (K + 1)) / (1 - math.exp(-d))
        raise ToleranceUnreachable(
            f"no summable coefficient tail for decay class {dc}")

    def describe(self) -> str:
        return self.label


def _variation_by_refinement(f: Callable[[float], float],
                             tol: float = 1e-6) -> float:
    """Total variation over one period by dyadic partition refinement."""
    n = 256
    prev = None
    while n <= (1 << 21):
        xs = np.arange(n + 1) / n
        vals = f(xs)
        v = float(np.sum(np.abs(np.diff(vals))))
        if prev is not None and abs(v - prev) < tol:
            return v
        prev = v
        n *= 2
    return prev


def make_trig_poly(coeffs: dict[int, complex],
                   declare_real: Optional[bool] = None) -> PeriodicFunction:
    """Exact finite Fourier sum; variation by adaptive partition refinement."""
    table = {int(k): complex(c) for k, c in coeffs.items() if c != 0}
    if not table:
        raise EmptyCoefficients("trig polynomial needs a nonzero coefficient")
    if declare_real is None:
        declare_real = all(
            table.get(-k, 0j) == table[k].conjugate() for k in table)
    ks = np.array(sorted(table), dtype=np.int64)
    cs = np.array([table[int(k)] for k in ks])

    def ev_np(x):
        x = np.asarray(x, dtype=np.float64)
        out = (cs[None, :] * np.exp(2j * np.pi * np.outer(x, ks))).sum(axis=1)
        return out.real if declare_real else out

    def ev(x):
        s = sum(c * cmath.exp(2j * math.pi * k * x) for k, c in table.items())
        return s.real if declare_real else s

    label = "trig:{" + ",".join(f"{k}={table[k]}" for k in sorted(table)) + "}"
    var = _variation_by_refinement(ev_np) if declare_real else None
    return PeriodicFunction(
        label=label,
        coeff=lambda k: table.get(k, 0j),
        mean=table.get(0, 0j),
        decay_class=DecayClass("finite"),
        is_real=declare_real,
        variation=var,
        evaluator=ev,
        evaluator_np=ev_np,
        support=tuple(sorted(table)),
        sup_norm=float(sum(abs(c) for c in table.values())),
    )


def make_sin() -> PeriodicFunction:
    """sin(2 pi x) with its exact coefficient pair; fast closed form."""
    g = make_trig_poly({1: -0.5j, -1: 0.5j}, declare_real=True)
    return replace(
        g, label="sin",
        evaluator=lambda x: math.sin(TWO_PI * x),
        evaluator_np=lambda x: np.sin(TWO_PI * np.asarray(x)),
        sup_norm=1.0)


def make_power_decay(t: float) -> PeriodicFunction:
    """Sine series sum_{k>=1} sin(2 pi k x)/k^t, so c_k = -i/(2 k^t).

    No closed form is attached; evaluation truncates the series with the
    smaller of the integral tail bound and the Dirichlet/Abel bound
    (K+1)^{-t}/|sin(pi x)|.
    """
    if t <= 1:
        raise DomainError("power decay needs t > 1", t=t)

    def coeff(k: int) -> complex:
        if k == 0:
            return 0j
        mag = 0.5 / abs(k) ** t
        return complex(0, -mag) if k > 0 else complex(0, mag)

    def eval_trunc(x, tol):
        x = float(x) % 1.0
        sinpix = abs(math.sin(math.pi * x))
        best = math.inf
        K = 16
        while True:
            integral = K ** (1 - t) / (t - 1)
            dirichlet = (K + 1) ** (-t) / sinpix if sinpix > 0 else math.inf
            best = min(integral, dirichlet)
            if best <= tol or K > 4_000_000:
                break
            K *= 2
        if best > tol:
            raise ToleranceUnreachable("power series tail bound stuck",
                                       tol=tol, bound=best)
        ks = np.arange(1, K + 1, dtype=np.float64)
        return float(np.sum(np.sin(TWO_PI * ((ks * x) % 1.0)) / ks ** t))

    return PeriodicFunction(
        label=f"power:{t:g}",
        coeff=coeff,
        mean=0j,
        decay_class=DecayClass("power", t),
        is_real=True,
        variation=None,
        evaluator=lambda x, _ev=eval_trunc: _ev(x, 1e-10),
        evaluator_np=None,
        evaluator_with_tol=eval_trunc,
        sup_norm=_zeta_real(t),
    )


def _zeta_real(t: float) -> float:
    # crude but safe upper bound for sum 1/k^t, enough for sup|g|
    n = np.arange(1, 20001, dtype=np.float64)
    return float(np.sum(n ** -t) + 20000 ** (1 - t) / (t - 1))


def make_analytic_decay(delta: float) -> PeriodicFunction:
    """c_k = e^{-delta |k|} (k != 0, mean zero); Poisson-kernel closed form
    g(x) = (2 r cos(2 pi x) - 2 r^2) / (1 - 2 r cos(2 pi x) + r^2), r=e^{-delta}."""
    if delta <= 0:
        raise DomainError("analytic decay needs delta > 0", delta=delta)
    r = math.exp(-delta)

    def ev(x):
        c = math.cos(TWO_PI * x)
        return (2 * r * c - 2 * r * r) / (1 - 2 * r * c + r * r)

    def ev_np(x):
        c = np.cos(TWO_PI * np.asarray(x, dtype=np.float64))
        return (2 * r * c - 2 * r * r) / (1 - 2 * r * c + r * r)

    return PeriodicFunction(
        label=f"analytic:{delta:g}",
        coeff=lambda k: complex(math.exp(-delta * abs(k))) if k else 0j,
        mean=0j,
        decay_class=DecayClass("analytic", delta),
        is_real=True,
        variation=_variation_by_refinement(ev_np),
        evaluator=ev,
        evaluator_np=ev_np,
        sup_norm=2 * r / (1 - r),
    )


def make_log_singular() -> PeriodicFunction:
    """g(x) = log|2 - 2 cos(2 pi x)| = 2 log|e^{2 pi i x} - 1|, c_k = -1/|k|."""

    def ev(x):
        s = math.sin(math.pi * (x % 1.0))
        if s == 0.0:
            raise EvaluationAtSingularity("log|2-2cos| at integer x", x=x)
        return 2.0 * math.log(2.0 * s)

    def ev_np(x):
        x = np.asarray(x, dtype=np.float64)
        s = np.abs(np.sin(np.pi * (x % 1.0)))
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(2.0 * s)

    return PeriodicFunction(
        label="logsin",
        coeff=lambda k: complex(-1.0 / abs(k)) if k else 0j,
        mean=0j,
        decay_class=DecayClass("log_singular"),
        is_real=True,
        variation=None,
        evaluator=ev,
        evaluator_np=ev_np,
        sup_norm=None,
    )


def make_sawtooth() -> PeriodicFunction:
    """g(x) = x - floor(x + 1/2): signed distance to the nearest integer.

    Sine coefficients b_k = (-1)^{k+1}/(pi k), i.e. c_k = -i(-1)^{k+1}/(2 pi k);
    the closed form is exact and the coefficients are checked against numeric
    Fourier integration in the test suite rather than taken on faith.
    """

    def coeff(k: int) -> complex:
        if k == 0:
            return 0j
        mag = (-1) ** (abs(k) + 1) / (TWO_PI * abs(k))
        return complex(0, -mag) if k > 0 else complex(0, mag)

    def ev(x):
        return x - math.floor(x + 0.5)

    def ev_np(x):
        x = np.asarray(x, dtype=np.float64)
        return x - np.floor(x + 0.5)

    return PeriodicFunction(
        label="sawtooth",
        coeff=coeff,
        mean=0j,
        decay_class=DecayClass("power", 1.0),  # 1/k decay; summable only in pairs
        is_real=True,
        variation=2.0,
        evaluator=ev,
        evaluator_np=ev_np,
        sup_norm=0.5,
    )


def evaluate(g: PeriodicFunction, x: float, tol: float = 1e-10) -> complex:
    """g(x) within tol: closed form when present, truncated Fourier sum else."""
    if tol <= 0:
        raise DomainError("tol must be positive", tol=tol)
    if g.evaluator_with_tol is not None:
        return g.evaluator_with_tol(x, tol)
    if g.evaluator is not None:
        return g.evaluator(x)
    dc = g.decay_class
    if dc.kind == "finite":
        return sum(g.coeff(k) * cmath.exp(2j * math.pi * k * x)
                   for k in g.support)
    K = 16
    while g.coeff_abs_tail(K) > tol:
        K *= 2
        if K > 1 << 24:
            raise ToleranceUnreachable("coefficient tail will not reach tol",
                                       tol=tol)
    total = 0j
    for k in range(-K, K + 1):
        if k:
            total += g.coeff(k) * cmath.exp(2j * math.pi * k * x)
    total += g.mean
    return total.real if g.is_real else total


# ---------------------------------------------------------------------------
# coboundary transfer
# ---------------------------------------------------------------------------

SMALL_DIVISOR_MIN = 1e-14


def _phase_float(alpha: AlphaSpec, k: int) -> float:
    """frac(k * alpha) from the 128-bit fixed-point representation."""
    fixed = alpha.phase_fixed()
    return ((k * fixed) % (1 << PHASE_BITS)) * _PHASE_INV


def divisor_at(alpha: AlphaSpec, k: int) -> complex:
    """e^{2 pi i k alpha} - 1 with the phase reduced exactly mod 1 first."""
    ph = _phase_float(alpha, k)
    return cmath.exp(2j * math.pi * ph) - 1.0


@dataclass(frozen=True)
class CoboundaryTransfer:
    base: PeriodicFunction
    alpha: AlphaSpec
    coeffs: dict[int, complex]       # h_k = c_k / (e^{2 pi i k alpha} - 1)
    K: int
    sup_bound: float                 # >= sup_x |h(x)|, includes mode tail

    def eval(self, x: float) -> complex:
        total = 0j
        for k, hk in self.coeffs.items():
            total += hk * cmath.exp(2j * math.pi * k * x)
        return total

    def eval_np(self, x: np.ndarray) -> np.ndarray:
        ks = np.array(sorted(self.coeffs), dtype=np.float64)
        hs = np.array([self.coeffs[int(k)] for k in ks])
        return (hs[None, :] * np.exp(2j * np.pi * np.outer(x, ks))).sum(axis=1)


def coboundary_transfer(g: PeriodicFunction, alpha: AlphaSpec,
                        K: int,
                        dio: Optional[DiophantineEstimate] = None
                        ) -> CoboundaryTransfer:
    """Solve g(x) = h(x+alpha) - h(x) mode by mode up to order K.

    sup_bound adds, on top of sum |h_k|, a coefficient-tail estimate using
    the Diophantine certificate |e^{2 pi i k alpha} - 1| >= 4 C / k^r.
    """
    if abs(g.mean) > 0:
        raise NonzeroMean("coboundary transfer needs c_0 = 0", mean=g.mean)
    if isinstance(alpha, RationalAlphaSpec):
        raise RationalAlpha("coboundary transfer needs irrational alpha")
    coeffs = {}
    supsum = 0.0
    for k in range(-K, K + 1):
        if k == 0:
            continue
        ck = g.coeff(k)
        if ck == 0:
            continue
        d = divisor_at(alpha, k)
        if abs(d) < SMALL_DIVISOR_MIN:
            raise SmallDivisorOverflow(
                "divisor below safe floor", k=k, divisor=abs(d))
        hk = ck / d
        coeffs[k] = hk
        supsum += abs(hk)
    tail = 0.0
    if g.decay_class.kind != "finite":
        if dio is None:
            dio = diophantine_type_estimate(cf_expand(alpha, 40))
        r, c = dio.r_hat, dio.C_hat
        # sum_{k>K} |c_k| k^r/(4C), summed numerically plus geometric remainder
        kk = np.arange(K + 1, K + 2001, dtype=np.float64)
        if g.decay_class.kind == "analytic":
            delta = g.decay_class.param
            body = np.exp(-delta * kk) * kk ** r
            ratio = math.exp(-delta) * (1 + 1.0 / (K + 2000)) ** r
            rest = float(body[-1]) * ratio / (1 - ratio)
        elif g.decay_class.kind == "power":
            t = g.decay_class.param
            if t - r <= 1:
                raise ToleranceUnreachable(
                    "power decay too weak against small divisors",
                    t=t, r_hat=r)
            body = 0.5 * kk ** (r - t)
            rest = 0.5 * (K + 2000) ** (r - t + 1) / (t - r - 1)
        else:
            raise ToleranceUnreachable(
                f"no transfer tail bound for decay class {g.decay_class}")
        tail = 2 * (float(body.sum()) + rest) / (4 * c)
    return CoboundaryTransfer(g, alpha, coeffs, K, supsum + tail)
