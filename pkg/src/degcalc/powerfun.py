"""Exact finite power sums with real exponents on compactified 1D domains.

Functions are finite sums  sum_m c_m t^{p_m} (1+t)^{q_m}  on [0, inf]
(half-line basis) or  sum_m c_m t^{p_m} (1-t)^{q_m}  on [0, 1] (unit-interval
basis).  The exponents may be arbitrary reals; rational exponents are kept as
exact ``Fraction`` objects so that cancellation is exact.  The class is closed
under addition, multiplication and d/dt, and endpoint limits are decided
exactly from the exponents.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import DomainMismatchError, EndpointEvalError

HALF_LINE = "half_line"       # basis t^p (1+t)^q on [0, inf]
UNIT_INTERVAL = "unit_interval"  # basis t^p (1-t)^q on [0, 1]

#: tolerance used to merge floating-point exponents into one key
EXP_TOL = 1e-12

#: relative threshold below which an aggregated float coefficient counts as zero
COEFF_REL_TOL = 1e-12


def as_exponent(x):
    """Normalize an exponent: ints, Fractions and strings become exact
    Fractions; floats are kept as floats (no guessing of intent)."""
    if isinstance(x, bool):
        raise TypeError("bool is not a valid exponent")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise TypeError(f"unsupported exponent type: {type(x)!r}")


def as_coefficient(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a valid coefficient")
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, float):
        return c
    if isinstance(c, complex):
        return c.real if c.imag == 0.0 else c
    raise TypeError(f"unsupported coefficient type: {type(c)!r}")


def exponents_equal(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) <= EXP_TOL


def _coeff_is_zero(c):
    return c == 0


def generalized_binomial(q, k):
    """binom(q, k) for real (possibly non-integer) q and integer k >= 0;
    exact when q is a Fraction."""
    num = Fraction(1) if isinstance(q, Fraction) else 1.0
    for i in range(k):
        num = num * (q - i)
    return num / math.factorial(k)


class RadialFunction:
    """A finite real-exponent power sum, exact under ring operations.

    ``terms`` maps (p, q) exponent pairs to nonzero coefficients.  Instances
    are immutable by convention; every operation returns a fresh object.
    """

    __slots__ = ("domain", "terms")

    def __init__(self, terms=None, domain=HALF_LINE):
        if domain not in (HALF_LINE, UNIT_INTERVAL):
            raise ValueError(f"unknown domain {domain!r}")
        object.__setattr__(self, "domain", domain)
        merged = {}
        if terms:
            for (p, q), c in dict(terms).items():
                _accumulate(merged, as_exponent(p), as_exponent(q),
                            as_coefficient(c))
        object.__setattr__(self, "terms", merged)

    def __setattr__(self, name, value):
        raise AttributeError("RadialFunction is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def term(cls, coeff, p, q=0, domain=HALF_LINE):
        return cls({(as_exponent(p), as_exponent(q)): coeff}, domain=domain)

    @classmethod
    def const(cls, c, domain=HALF_LINE):
        return cls.term(c, 0, 0, domain=domain)

    @classmethod
    def zero(cls, domain=HALF_LINE):
        return cls({}, domain=domain)

    @classmethod
    def t_power(cls, p, domain=HALF_LINE):
        return cls.term(1, p, 0, domain=domain)

    # -- basic predicates -------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_single_term(self):
        return len(self.terms) == 1

    @property
    def is_constant(self):
        if self.is_zero:
            return True
        return self.is_single_term and (0, 0) in self.terms

    def constant_value(self):
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("not a constant")
        return self.terms[(Fraction(0), Fraction(0))]

    def _require_same_domain(self, other):
        if self.domain != other.domain:
            raise DomainMismatchError(
                f"domain mismatch: {self.domain} vs {other.domain}")

    # -- ring structure ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float, Fraction, complex)):
            other = RadialFunction.const(other, domain=self.domain)
        if not isinstance(other, RadialFunction):
            return NotImplemented
        self._require_same_domain(other)
        merged = dict(self.terms)
        for (p, q), c in other.terms.items():
            _accumulate(merged, p, q, c)
        return _wrap(merged, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return _wrap({k: -c for k, c in self.terms.items()}, self.domain)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RadialFunction) else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction, complex)):
            other = as_coefficient(other)
            if _coeff_is_zero(other):
                return RadialFunction.zero(self.domain)
            return _wrap({k: c * other for k, c in self.terms.items()},
                         self.domain)
        if not isinstance(other, RadialFunction):
            return NotImplemented
        self._require_same_domain(other)
        merged = {}
        for (p1, q1), c1 in self.terms.items():
            for (p2, q2), c2 in other.terms.items():
                _accumulate(merged, p1 + p2, q1 + q2, c1 * c2)
        return _wrap(merged, self.domain)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = RadialFunction.const(1, domain=self.domain)
        for _ in range(n):
            out = out * self
        return out

    def divide_term(self, other):
        """Exact quotient by a single-term function (subtract exponents)."""
        self._require_same_domain(other)
        if not other.is_single_term:
            raise ValueError("divisor must be a single term")
        ((p0, q0), c0), = other.terms.items()
        merged = {}
        for (p, q), c in self.terms.items():
            _accumulate(merged, p - p0, q - q0, c / c0)
        return _wrap(merged, self.domain)

    def derivative(self):
        """Exact d/dt in the ring."""
        sign = 1 if self.domain == HALF_LINE else -1
        merged = {}
        for (p, q), c in self.terms.items():
            if not _coeff_is_zero(p * c):
                _accumulate(merged, p - 1, q, p * c)
            if not _coeff_is_zero(q * c):
                _accumulate(merged, p, q - 1, sign * q * c)
        return _wrap(merged, self.domain)

    # -- coordinate changes ----------------------------------------------

    def invert(self):
        """The function t -> f(1/t), again in the half-line basis.

        t^p (1+t)^q at 1/r equals r^{-(p+q)} (1+r)^q, so this stays exact.
        """
        if self.domain != HALF_LINE:
            raise DomainMismatchError("invert is a half-line operation")
        merged = {}
        for (p, q), c in self.terms.items():
            _accumulate(merged, -(p + q), q, c)
        return _wrap(merged, HALF_LINE)

    def flip(self):
        """The function t -> f(1-t) on the unit interval (swap the basis
        factors)."""
        if self.domain != UNIT_INTERVAL:
            raise DomainMismatchError("flip is a unit-interval operation")
        merged = {}
        for (p, q), c in self.terms.items():
            _accumulate(merged, q, p, c)
        return _wrap(merged, UNIT_INTERVAL)

    # -- exponent data ----------------------------------------------------

    def min_p(self):
        """Leading exponent at t = 0 (+inf for the zero function)."""
        if self.is_zero:
            return math.inf
        return min(self.terms, key=lambda k: k[0])[0]

    def max_pq(self):
        """Leading exponent at t = inf, half-line only (-inf for zero)."""
        if self.domain != HALF_LINE:
            raise DomainMismatchError("max_pq is a half-line notion")
        if self.is_zero:
            return -math.inf
        return max(p + q for (p, q) in self.terms)

    def min_q(self):
        """Leading exponent at t = 1, unit interval only."""
        if self.domain != UNIT_INTERVAL:
            raise DomainMismatchError("min_q is a unit-interval notion")
        if self.is_zero:
            return math.inf
        return min(q for (_, q) in self.terms)

    def far_exponent(self):
        """Leading exponent at the far endpoint (inf or 1).

        For the half-line this is -max(p+q), i.e. positive exponents mean
        decay; for the unit interval it is min q, with the same reading.
        """
        if self.domain == HALF_LINE:
            return -self.max_pq()
        return self.min_q()

    # -- endpoint limits and continuity ----------------------------------

    def limit(self, end):
        """Endpoint limit: ``end`` is 'zero' or 'far' ('infinity' accepted
        as an alias of 'far' on the half-line).  Returns a finite value or
        +/-inf."""
        if end == "zero":
            return _series_limit_at_zero(self)
        if end in ("far", "infinity", "one"):
            if self.domain == HALF_LINE:
                return _series_limit_at_zero(self.invert())
            return _series_limit_at_zero(self.flip())
        raise ValueError(f"unknown endpoint {end!r}")

    def is_continuous(self):
        """True iff both endpoint limits are finite, i.e. the function
        extends continuously to the compactified domain."""
        for end in ("zero", "far"):
            v = self.limit(end)
            if isinstance(v, complex):
                continue
            if math.isinf(v):
                return False
        return True

    def __call__(self, t):
        """Exact floating evaluation at a strictly interior point."""
        t = float(t)
        if not (t > 0.0) or math.isinf(t):
            raise EndpointEvalError(f"t={t} is not interior; use limit()")
        if self.domain == UNIT_INTERVAL and not (t < 1.0):
            raise EndpointEvalError(f"t={t} is not interior; use limit()")
        sign = 1.0 if self.domain == HALF_LINE else -1.0
        total = 0.0
        for (p, q), c in self.terms.items():
            base = 1.0 + sign * t
            val = t ** float(p) * base ** float(q)
            total = total + (complex(c) if isinstance(c, complex) else float(c)) * val
        return total

    # -- comparison and display ------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RadialFunction):
            return NotImplemented
        return self.domain == other.domain and self.terms == other.terms

    __hash__ = None

    def isclose(self, other, tol=1e-12):
        """Coefficient-wise comparison with tolerance (same key sets after
        merging the difference)."""
        diff = self - other
        if diff.is_zero:
            return True
        scale = max(
            [abs(complex(c)) for c in self.terms.values()]
            + [abs(complex(c)) for c in other.terms.values()] + [1.0])
        return all(abs(complex(c)) <= tol * scale for c in diff.terms.values())

    def __repr__(self):
        return f"RadialFunction({self.to_text()!r})"

    # -- serialization ----------------------------------------------------

    def to_text(self):
        """One ``coeff * t^p * (1+t)^q`` triple per line; rational exponents
        round-trip exactly."""
        if self.is_zero:
            return "0"
        factor = "(1+t)" if self.domain == HALF_LINE else "(1-t)"
        keys = sorted(self.terms, key=lambda k: (float(k[0]), float(k[1])))
        lines = []
        for p, q in keys:
            c = self.terms[(p, q)]
            lines.append(f"{_num_to_text(c)} * t^{_num_to_text(p)}"
                         f" * {factor}^{_num_to_text(q)}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text):
        text = text.strip()
        if text == "0" or not text:
            return cls.zero()
        pat = re.compile(
            r"^\s*(?P<c>\S+)\s*\*\s*t\^(?P<p>\S+)\s*\*\s*"
            r"\((?P<factor>1\+t|1-t)\)\^(?P<q>\S+)\s*$")
        terms = {}
        domain = None
        for line in text.splitlines():
            if not line.strip():
                continue
            m = pat.match(line)
            if m is None:
                raise ValueError(f"unparseable term line: {line!r}")
            dom = HALF_LINE if m.group("factor") == "1+t" else UNIT_INTERVAL
            if domain is None:
                domain = dom
            elif domain != dom:
                raise ValueError("mixed basis factors in serialized function")
            p = _num_from_text(m.group("p"))
            q = _num_from_text(m.group("q"))
            c = _num_from_text(m.group("c"))
            _accumulate(terms, as_exponent(p), as_exponent(q),
                        as_coefficient(c))
        return cls(terms, domain=domain or HALF_LINE)


def ring_combine(f, g, kind="add", c=None):
    """Functional wrapper over the ring operations (add, mul, scale)."""
    if kind == "add":
        return f + g
    if kind == "mul":
        return f * g
    if kind == "scale":
        if c is None:
            raise ValueError("scale needs a coefficient")
        return f * c
    raise ValueError(f"unknown kind {kind!r}")


# -- internals ------------------------------------------------------------

def _accumulate(merged, p, q, c):
    if _coeff_is_zero(c):
        return
    key = (p, q)
    if key in merged:
        new = merged[key] + c
        if _coeff_is_zero(new):
            del merged[key]
        else:
            merged[key] = new
        return
    # tolerance merge for float exponents that are not hash-equal
    if isinstance(p, float) or isinstance(q, float):
        for (p0, q0) in merged:
            if exponents_equal(p0, p) and exponents_equal(q0, q):
                new = merged[(p0, q0)] + c
                if _coeff_is_zero(new):
                    del merged[(p0, q0)]
                else:
                    merged[(p0, q0)] = new
                return
    merged[key] = c


def _wrap(merged, domain):
    out = RadialFunction.__new__(RadialFunction)
    object.__setattr__(out, "domain", domain)
    object.__setattr__(out, "terms", merged)
    return out


def _series_limit_at_zero(f):
    """Limit of f at t -> 0+ via the generalized power series of the second
    basis factor; exact for rational exponents."""
    if f.is_zero:
        return Fraction(0)
    sign = 1 if f.domain == HALF_LINE else -1
    # candidate effective exponents e = p + k <= 0, k integer >= 0
    candidates = []
    for (p, q) in f.terms:
        k = 0
        while p + k <= EXP_TOL:
            candidates.append(p + k)
            k += 1
    if not candidates:
        return Fraction(0)  # all exponents positive
    # sort / dedupe with tolerance
    candidates.sort(key=float)
    unique = []
    for e in candidates:
        if not unique or not exponents_equal(unique[-1], e):
            unique.append(e)
    for e in unique:
        total = Fraction(0)
        scale = 0.0
        for (p, q), c in f.terms.items():
            kf = e - p
            k = int(round(float(kf)))
            if k < 0 or not exponents_equal(p + k, e):
                continue
            contrib = c * (generalized_binomial(q, k) * (sign ** k))
            total = total + contrib
            scale = max(scale, abs(complex(contrib)))
        if _coeff_is_zero(total):
            continue
        if not isinstance(total, (Fraction,)) and scale > 0.0 \
                and abs(complex(total)) <= COEFF_REL_TOL * scale:
            continue  # float cancellation noise
        if e < -EXP_TOL:
            s = total.real if isinstance(total, complex) else total
            return math.inf if s > 0 else -math.inf
        return total
    return Fraction(0)


def _num_to_text(x):
    if isinstance(x, Fraction):
        return str(x)  # "3/2" or "-2"
    if isinstance(x, complex):
        return f"({x.real!r}{x.imag:+}j)"
    return repr(x)


def _num_from_text(s):
    s = s.strip()
    if s.startswith("(") and s.endswith("j)"):
        return complex(s[1:-1] + "j")
    if "/" in s or ("." not in s and "e" not in s and "E" not in s):
        return Fraction(s)
    return float(s)
