"""Exact rotation numbers, continued fractions and Diophantine type estimates.

The rotation number alpha is carried exactly (rational p/q, quadratic surd
(A + B*sqrt(D))/Q, or a decimal string with a stated number of guaranteed
places).  All partial quotients, convergents and phase values are produced
by integer arithmetic; floating point only appears at the very end when a
float is explicitly requested.  The 128-bit fixed-point phase is the
primitive every other module uses to reduce n*alpha mod 1 without drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DepthExceeded, DomainError, PrecisionExhausted

PHASE_BITS = 128


# ---------------------------------------------------------------------------
# alpha specifications
# ---------------------------------------------------------------------------

class AlphaSpec:
    """Base class for exact rotation-number specifications."""

    def value(self) -> float:
        raise NotImplementedError

    def phase_fixed(self, bits: int = PHASE_BITS) -> int:
        """floor(frac(alpha) * 2**bits), exact for rational/surd input."""
        raise NotImplementedError

    @property
    def is_rational(self) -> bool:
        return False

    def spec_string(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec_string()


@dataclass(frozen=True)
class RationalAlphaSpec(AlphaSpec):
    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("rational alpha needs q >= 1", q=self.q)
        if math.gcd(self.p, self.q) != 1:
            raise DomainError("rational alpha must be in lowest terms",
                              p=self.p, q=self.q)

    @property
    def is_rational(self) -> bool:
        return True

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def value(self) -> float:
        return self.p / self.q

    def phase_fixed(self, bits: int = PHASE_BITS) -> int:
        return ((self.p << bits) // self.q) % (1 << bits)

    def spec_string(self) -> str:
        return f"rat:{self.p}/{self.q}"


@dataclass(frozen=True)
class SurdAlpha(AlphaSpec):
    """(A + B*sqrt(D)) / Q with D a positive non-square, normalised to Q > 0
    and gcd(A, B, Q) = 1."""

    A: int
    B: int
    D: int
    Q: int

    def __post_init__(self):
        if self.Q == 0:
            raise DomainError("surd alpha needs Q != 0")
        if self.B == 0:
            raise DomainError("surd alpha needs B != 0 (use rat: for rationals)")
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise DomainError("surd alpha needs a positive non-square D",
                              D=self.D)

    @staticmethod
    def normalized(A: int, B: int, D: int, Q: int) -> "SurdAlpha":
        if Q < 0:
            A, B, Q = -A, -B, -Q
        g = math.gcd(math.gcd(abs(A), abs(B)), Q)
        if g > 1:
            A, B, Q = A // g, B // g, Q // g
        return SurdAlpha(A, B, D, Q)

    def value(self) -> float:
        return float(self.as_fraction(96))

    def as_fraction(self, bits: int = PHASE_BITS) -> Fraction:
        """Rational approximation with error below 2**(1-bits)."""
        return Fraction(self._scaled_floor(bits), 1 << bits)

    def _scaled_floor(self, bits: int) -> int:
        # floor(alpha * 2**bits) by integer square root; B*sqrt(D)*2**bits
        # lies in an open unit interval around T = isqrt(B^2 D 4^bits).
        t = math.isqrt(self.B * self.B * self.D << (2 * bits))
        num_floor = (self.A << bits) + (t if self.B > 0 else -t - 1)
        return num_floor // self.Q

    def phase_fixed(self, bits: int = PHASE_BITS) -> int:
        return self._scaled_floor(bits) % (1 << bits)

    def spec_string(self) -> str:
        return f"surd:{self.A},{self.B},{self.D},{self.Q}"


@dataclass(frozen=True)
class DecimalAlpha(AlphaSpec):
    digits: str
    places: int

    def __post_init__(self):
        if self.places < 1:
            raise DomainError("decimal alpha needs guaranteed_places >= 1")
        x = self.as_fraction()
        if not (-(10 ** 9) < x < 10 ** 9):
            raise DomainError("decimal alpha out of range (-1e9, 1e9)")

    def as_fraction(self) -> Fraction:
        try:
            return Fraction(self.digits)
        except ValueError as exc:
            raise DomainError(f"cannot parse decimal digits {self.digits!r}") from exc

    def uncertainty(self) -> Fraction:
        return Fraction(1, 10 ** self.places)

    def value(self) -> float:
        return float(self.as_fraction())

    def phase_fixed(self, bits: int = PHASE_BITS) -> int:
        x = self.as_fraction()
        return math.floor(x * (1 << bits)) % (1 << bits)

    def spec_string(self) -> str:
        return f"dec:{self.digits}@{self.places}"


def alpha_rational(p: int, q: int) -> RationalAlphaSpec:
    g = math.gcd(p, q)
    if q < 0:
        p, q = -p, -q
    if g > 1:
        p, q = p // g, q // g
    return RationalAlphaSpec(p, q)


def alpha_surd(A: int, B: int, D: int, Q: int) -> SurdAlpha:
    return SurdAlpha.normalized(A, B, D, Q)


def alpha_decimal(digits: str, places: int) -> DecimalAlpha:
    return DecimalAlpha(digits, places)


def parse_alpha(text: str) -> AlphaSpec:
    """Parse 'rat:p/q | surd:A,B,D,Q | dec:<digits>@<places>'."""
    from .errors import ParseError

    try:
        tag, _, body = text.partition(":")
        if tag == "rat":
            p, _, q = body.partition("/")
            return alpha_rational(int(p), int(q))
        if tag == "surd":
            a, b, d, q = (int(v) for v in body.split(","))
            return alpha_surd(a, b, d, q)
        if tag == "dec":
            digits, _, places = body.partition("@")
            return alpha_decimal(digits, int(places))
    except (ValueError, DomainError) as exc:
        raise ParseError(f"bad alpha spec {text!r}: {exc}") from exc
    raise ParseError(f"bad alpha spec {text!r} (want rat:|surd:|dec:)")


GOLDEN = alpha_surd(-1, 1, 5, 2)          # (sqrt(5)-1)/2
SQRT2_MINUS_1 = alpha_surd(-1, 1, 2, 1)   # sqrt(2)-1


# ---------------------------------------------------------------------------
# exact sign comparisons for u + v*sqrt(D)
# ---------------------------------------------------------------------------

def surd_sign(u: int, v: int, D: int) -> int:
    """Sign of u + v*sqrt(D) using only integer arithmetic."""
    if v == 0:
        return (u > 0) - (u < 0)
    if v > 0:
        if u >= 0:
            return 1
        # u < 0: compare v^2 D against u^2
        return 1 if v * v * D > u * u else (-1 if v * v * D < u * u else 0)
    if u <= 0:
        return -1
    return 1 if u * u > v * v * D else (-1 if u * u < v * v * D else 0)


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuedFraction:
    a0: int
    partial_quotients: tuple[int, ...]
    exact: bool
    period: Optional[tuple[int, int]] = None        # (start, length), surds
    terminated: bool = False                        # rational ended early
    source_alpha: Optional[AlphaSpec] = None

    @property
    def quotients(self) -> tuple[int, ...]:
        return (self.a0,) + self.partial_quotients

    def __len__(self) -> int:
        return 1 + len(self.partial_quotients)


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int
    distance: float


@dataclass(frozen=True)
class DiophantineEstimate:
    r_hat: float
    C_hat: float
    constant_type: bool
    witnesses: tuple[tuple[int, int], ...]


def _floor_surd_state(P: int, N: int, Qc: int) -> int:
    """floor((P + sqrt(N)) / Qc) for non-square N > 0 and Qc != 0."""
    s = math.isqrt(N)
    if Qc > 0:
        return (P + s) // Qc
    return (-P - s - 1) // (-Qc)


def _cf_surd(alpha: SurdAlpha, depth: int):
    A, B, D, Q = alpha.A, alpha.B, alpha.D, alpha.Q
    N = B * B * D
    if B > 0:
        P, Qc = A, Q
    else:
        P, Qc = -A, -Q
    if (N - P * P) % Qc != 0:
        P *= abs(Qc)
        N *= Qc * Qc
        Qc *= abs(Qc)
    quotients = []
    seen: dict[tuple[int, int], int] = {}
    period = None
    for i in range(depth):
        state = (P, Qc)
        if state in seen:
            period = (seen[state], i - seen[state])
            break
        seen[state] = i
        a = _floor_surd_state(P, N, Qc)
        quotients.append(a)
        P = a * Qc - P
        Qc = (N - P * P) // Qc
    if period is not None:
        start, length = period
        while len(quotients) < depth:
            quotients.append(quotients[start + (len(quotients) - start) % length])
    return quotients, period


def _cf_rational(x: Fraction, depth: int):
    quotients = []
    p, q = x.numerator, x.denominator
    for _ in range(depth):
        a = p // q
        quotients.append(a)
        p, q = q, p - a * q
        if q == 0:
            break
    return quotients


def _cf_decimal(alpha: DecimalAlpha, depth: int):
    eps = alpha.uncertainty()
    x = alpha.as_fraction()
    lo, hi = x - eps, x + eps
    quotients: list[int] = []
    for _ in range(depth):
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            raise PrecisionExhausted(
                "decimal digits cannot certify partial quotient",
                certified=len(quotients))
        quotients.append(a_lo)
        flo, fhi = lo - a_lo, hi - a_lo
        if flo <= 0:
            raise PrecisionExhausted(
                "interval touches an integer; next quotient uncertifiable",
                certified=len(quotients))
        lo, hi = 1 / fhi, 1 / flo
    return quotients


def cf_expand(alpha: AlphaSpec, depth: int) -> ContinuedFraction:
    """First `depth` terms [a0; a1, a2, ...] of the continued fraction.

    Surd input runs the classical (P + sqrt(N))/Q reduction in exact integer
    arithmetic and reports the detected period.  Decimal input certifies each
    quotient from the guaranteed-places interval and raises
    PrecisionExhausted on the first ambiguous one.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1", depth=depth)
    if isinstance(alpha, SurdAlpha):
        quotients, period = _cf_surd(alpha, depth)
        return ContinuedFraction(quotients[0], tuple(quotients[1:]), True,
                                 period=period, source_alpha=alpha)
    if isinstance(alpha, RationalAlphaSpec):
        quotients = _cf_rational(alpha.as_fraction(), depth)
        terminated = len(quotients) < depth
        return ContinuedFraction(quotients[0], tuple(quotients[1:]), True,
                                 terminated=terminated, source_alpha=alpha)
    if isinstance(alpha, DecimalAlpha):
        quotients = _cf_decimal(alpha, depth)
        return ContinuedFraction(quotients[0], tuple(quotients[1:]), False,
                                 source_alpha=alpha)
    raise DomainError(f"unknown alpha spec {alpha!r}")


def _distance(alpha: Optional[AlphaSpec], p: int, q: int) -> float:
    if alpha is None:
        return math.nan
    if isinstance(alpha, RationalAlphaSpec):
        return abs(float(alpha.as_fraction() - Fraction(p, q)))
    if isinstance(alpha, DecimalAlpha):
        return abs(float(alpha.as_fraction() - Fraction(p, q)))
    assert isinstance(alpha, SurdAlpha)
    bits = max(192, 4 * q.bit_length() + 64)
    return abs(float(alpha.as_fraction(bits) - Fraction(p, q)))


def convergents(cf: ContinuedFraction, m: int) -> list[Convergent]:
    """First m convergents p_0/q_0 ... p_{m-1}/q_{m-1} by the standard
    recurrence, with |alpha - p/q| computed from the exact alpha when the
    expansion carries one."""
    if m < 1:
        raise DomainError("m must be >= 1", m=m)
    qs = cf.quotients
    if m > len(qs):
        raise DepthExceeded("continued fraction holds fewer quotients",
                            have=len(qs), want=m)
    out = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = qs[0], 1
    out.append(Convergent(p_cur, q_cur, 0, _distance(cf.source_alpha, p_cur, q_cur)))
    for i in range(1, m):
        a = qs[i]
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        out.append(Convergent(p_cur, q_cur, i,
                              _distance(cf.source_alpha, p_cur, q_cur)))
    return out


def diophantine_type_estimate(cf: ContinuedFraction) -> DiophantineEstimate:
    """Estimate (r, C) with |alpha - p/q| >= C / q^{1+r}.

    r_hat is the running maximum of log q_{m+1} / log q_m over computed
    convergents with q_m >= 2.  C_hat is certified from the universal bound
    |alpha - p_m/q_m| >= 1/(q_m (q_m + q_{m+1})), so the pair (C_hat, r_hat)
    is a valid lower-bound certificate for every k below the largest
    computed denominator, in both normalisations
    (|alpha - p/q| >= C/q^{1+r} and ||q alpha|| >= C/q^r).
    """
    if len(cf) < 3:
        raise DepthExceeded("need at least 3 quotients", have=len(cf))
    convs = convergents(cf, len(cf))
    qs = [c.q for c in convs]
    ratios = []
    witnesses = []
    for i in range(len(qs) - 1):
        witnesses.append((qs[i], qs[i + 1]))
        if qs[i] >= 2:
            ratios.append(math.log(qs[i + 1]) / math.log(qs[i]))
    r_hat = max(ratios) if ratios else 1.0
    c_hat = min(qs[i] ** r_hat / (qs[i] + qs[i + 1]) for i in range(len(qs) - 1))
    partials = cf.partial_quotients
    half = max(1, len(partials) // 2)
    constant_type = bool(partials) and max(partials) == max(partials[:half])
    return DiophantineEstimate(r_hat, c_hat, constant_type, tuple(witnesses))


def small_divisor_floor(est: DiophantineEstimate, k: int) -> float:
    """Certified lower bound for |e^{2 pi i k alpha} - 1| = 2|sin(pi k alpha)|,
    via |sin(pi x)| >= 2 ||x|| and ||k alpha|| >= C_hat / k^r_hat."""
    return 4.0 * est.C_hat / k ** est.r_hat
