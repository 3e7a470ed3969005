"""Differential operators on the cylinder [0, inf] x S^1.

Operators come in three coefficient forms:

* ``raw``:       sum_{i,j} b_{ij}(t, theta) dt^i dtheta^j
* ``lie``:       sum_{i,j} c_{ij} X^i Y^j  with X = phi*dt, Y = psi*dtheta
* ``monomial``:  sum_{i,j} c_{ij} phi^i psi^j dt^i dtheta^j

Raw form is the computational workhorse (exact Leibniz composition); lie and
monomial are the two normal forms.  The lie -> monomial conversion runs
through the triangular recurrence for powers of X, and raw composition is an
independent oracle for it.
"""

from __future__ import annotations

import math
from math import comb

from .errors import DomainMismatchError, PreconditionError
from .powerfun import HALF_LINE, RadialFunction
from .weights import Weight, membership_order

import numpy as np


class CylinderFunction:
    """Finite Fourier sum  sum_m f_m(t) e^{i m theta}  with ring coefficients."""

    __slots__ = ("modes", "domain")

    def __init__(self, modes, domain=HALF_LINE):
        clean = {}
        for m, f in modes.items():
            if not isinstance(m, int):
                raise TypeError("Fourier modes must be integers")
            if isinstance(f, RadialFunction):
                if f.domain != domain:
                    raise DomainMismatchError("mixed base domains")
                if not f.is_zero:
                    clean[m] = f
            else:
                g = RadialFunction.const(f, domain=domain)
                if not g.is_zero:
                    clean[m] = g
        object.__setattr__(self, "modes", clean)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, name, value):
        raise AttributeError("CylinderFunction is immutable")

    @classmethod
    def radial(cls, f):
        if not isinstance(f, RadialFunction):
            raise TypeError("expected a RadialFunction")
        return cls({0: f}, domain=f.domain)

    @classmethod
    def const(cls, c, domain=HALF_LINE):
        return cls({0: RadialFunction.const(c, domain=domain)}, domain=domain)

    @classmethod
    def zero(cls, domain=HALF_LINE):
        return cls({}, domain=domain)

    @classmethod
    def harmonic(cls, m, domain=HALF_LINE, coeff=1):
        """coeff * e^{i m theta}"""
        return cls({m: RadialFunction.const(coeff, domain=domain)},
                   domain=domain)

    @property
    def is_zero(self):
        return not self.modes

    @property
    def is_radial(self):
        return set(self.modes) <= {0}

    def radial_part(self):
        return self.modes.get(0, RadialFunction.zero(domain=self.domain))

    def is_real_valued(self):
        """Conjugate symmetry f_{-m} = conj(f_m) with real mode-0 part."""
        for m, f in self.modes.items():
            g = self.modes.get(-m)
            if g is None:
                return False
            for (p, q), c in f.terms.items():
                d = g.terms.get((p, q))
                if d is None or complex(d) != complex(c).conjugate():
                    return False
        return True

    def __add__(self, other):
        other = self._coerce(other)
        merged = dict(self.modes)
        for m, f in other.modes.items():
            merged[m] = merged[m] + f if m in merged else f
        return CylinderFunction(merged, domain=self.domain)

    __radd__ = __add__

    def __neg__(self):
        return CylinderFunction({m: -f for m, f in self.modes.items()},
                                domain=self.domain)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)) or hasattr(other, "numerator"):
            return CylinderFunction({m: f * other
                                     for m, f in self.modes.items()},
                                    domain=self.domain)
        if isinstance(other, RadialFunction):
            other = CylinderFunction.radial(other)
        merged = {}
        for m1, f1 in self.modes.items():
            for m2, f2 in other.modes.items():
                m = m1 + m2
                prod = f1 * f2
                merged[m] = merged[m] + prod if m in merged else prod
        return CylinderFunction(merged, domain=self.domain)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, CylinderFunction):
            if other.domain != self.domain:
                raise DomainMismatchError("mixed base domains")
            return other
        if isinstance(other, RadialFunction):
            return CylinderFunction.radial(other)
        return CylinderFunction.const(other, domain=self.domain)

    def d_t(self):
        return CylinderFunction({m: f.derivative()
                                 for m, f in self.modes.items()},
                                domain=self.domain)

    def d_theta(self):
        return CylinderFunction({m: f * (1j * m)
                                 for m, f in self.modes.items() if m != 0},
                                domain=self.domain)

    def __call__(self, t, theta):
        return sum(complex(0) + f(t) * complex(math.cos(m * theta),
                                               math.sin(m * theta))
                   for m, f in self.modes.items())

    def __eq__(self, other):
        if not isinstance(other, CylinderFunction):
            return NotImplemented
        return self.domain == other.domain and self.modes == other.modes

    __hash__ = None

    def __repr__(self):
        if self.is_zero:
            return "CylinderFunction(0)"
        parts = [f"e^{{{m}i theta}}*({f.to_text()})"
                 for m, f in sorted(self.modes.items())]
        return "CylinderFunction(" + " + ".join(parts) + ")"


def _as_cylinder(c, domain):
    if isinstance(c, CylinderFunction):
        return c
    if isinstance(c, RadialFunction):
        return CylinderFunction.radial(c)
    return CylinderFunction.const(c, domain=domain)


def expand_X_power(phi, n):
    """Monomial coefficients of X^n = sum_k a_k phi^k dt^k.

    Triangular recurrence a_k -> X(a_k) + k a_k phi' + a_{k-1}, starting from
    X^0 = 1.  All coefficients stay in the ring.
    """
    w = phi if isinstance(phi, Weight) else Weight(phi)
    prof = w.profile
    dprof = prof.derivative()
    coeffs = {0: RadialFunction.const(1, domain=prof.domain)}
    for _ in range(n):
        nxt = {}
        for k, a in coeffs.items():
            term = prof * a.derivative() + a * dprof * k
            if not term.is_zero:
                nxt[k] = nxt[k] + term if k in nxt else term
            nxt[k + 1] = nxt[k + 1] + a if k + 1 in nxt else a
        coeffs = {k: v for k, v in nxt.items() if not v.is_zero}
    return coeffs


class DiffOp:
    """A differential operator on the cylinder in one of the three forms."""

    __slots__ = ("form", "coeffs", "phi", "psi")

    def __init__(self, form, coeffs, phi, psi=None):
        if form not in ("raw", "lie", "monomial"):
            raise ValueError(f"unknown form {form!r}")
        w_phi = phi if isinstance(phi, Weight) else Weight(phi)
        if psi is None:
            psi = Weight.from_term(1, 1, 0, domain=w_phi.domain)
        w_psi = psi if isinstance(psi, Weight) else Weight(psi)
        if w_phi.domain != w_psi.domain:
            raise DomainMismatchError("phi and psi on different domains")
        clean = {}
        for (i, j), c in coeffs.items():
            cf = _as_cylinder(c, w_phi.domain)
            if not cf.is_zero:
                clean[(int(i), int(j))] = cf
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "phi", w_phi)
        object.__setattr__(self, "psi", w_psi)

    def __setattr__(self, name, value):
        raise AttributeError("DiffOp is immutable")

    @property
    def domain(self):
        return self.phi.domain

    @property
    def order(self):
        if not self.coeffs:
            return -math.inf
        return max(i + j for (i, j) in self.coeffs)

    @property
    def is_radial(self):
        return all(j == 0 and c.is_radial for (i, j), c in self.coeffs.items())

    @classmethod
    def identity(cls, phi, psi=None):
        w = phi if isinstance(phi, Weight) else Weight(phi)
        return cls("raw", {(0, 0): CylinderFunction.const(1, domain=w.domain)},
                   phi, psi)

    @classmethod
    def X(cls, phi, psi=None):
        return cls("lie", {(1, 0): 1}, phi, psi)

    @classmethod
    def Y(cls, phi, psi):
        return cls("lie", {(0, 1): 1}, phi, psi)

    def _same_weights(self, other):
        return (self.phi == other.phi and self.psi == other.psi)

    # -- form conversions ------------------------------------------------

    def to_raw(self):
        if self.form == "raw":
            return self
        if self.form == "monomial":
            raw = {}
            for (i, j), c in self.coeffs.items():
                b = c * (self.phi.profile ** i) * (self.psi.profile ** j)
                _raw_add(raw, i, j, b)
            return DiffOp("raw", raw, self.phi, self.psi)
        # lie: c * X^i Y^j with Y^j = psi^j dtheta^j
        raw = {}
        for (i, j), c in self.coeffs.items():
            xpow = expand_X_power(self.phi, i)
            # X^i as raw: sum_k a_k phi^k dt^k, then compose with psi^j dtheta^j
            left = {(k, 0): _as_cylinder(a * (self.phi.profile ** k),
                                         self.domain)
                    for k, a in xpow.items()}
            right = {(0, j): _as_cylinder(self.psi.profile ** j, self.domain)}
            for (i1, j1), b1 in left.items():
                for (i2, j2), b2 in right.items():
                    for (ii, jj), bb in _compose_terms(i1, j1, b1,
                                                       i2, j2, b2).items():
                        _raw_add(raw, ii, jj, c * bb)
            # (the c multiplier commutes to the left of everything)
        return DiffOp("raw", raw, self.phi, self.psi)

    def to_monomial(self):
        if self.form == "monomial":
            return self
        raw = self.to_raw()
        if not (self.phi.is_single_term and self.psi.is_single_term):
            raise PreconditionError(
                "exact monomial form needs single-term phi and psi")
        phi_p, psi_p = self.phi.profile, self.psi.profile
        coeffs = {}
        for (i, j), b in raw.coeffs.items():
            den = (phi_p ** i) * (psi_p ** j)
            c = CylinderFunction({m: f.divide_term(den)
                                  for m, f in b.modes.items()},
                                 domain=self.domain)
            coeffs[(i, j)] = c
        return DiffOp("monomial", coeffs, self.phi, self.psi)

    def to_lie(self):
        """Triangular elimination from the highest (i + j, i) raw term."""
        if self.form == "lie":
            return self
        if not (self.phi.is_single_term and self.psi.is_single_term):
            raise PreconditionError(
                "exact lie form needs single-term phi and psi")
        remaining = dict(self.to_raw().coeffs)
        phi_p, psi_p = self.phi.profile, self.psi.profile
        lie = {}
        while remaining:
            (i, j) = max(remaining, key=lambda k: (k[0] + k[1], k[0]))
            b = remaining[(i, j)]
            den = (phi_p ** i) * (psi_p ** j)
            c = CylinderFunction({m: f.divide_term(den)
                                  for m, f in b.modes.items()},
                                 domain=self.domain)
            lie[(i, j)] = c
            # subtract c * X^i Y^j; the top raw term cancels exactly
            sub = DiffOp("lie", {(i, j): c}, self.phi, self.psi).to_raw()
            for key, bb in sub.coeffs.items():
                _raw_add(remaining, key[0], key[1], -1 * bb)
            if (i, j) in remaining:
                raise PreconditionError(
                    "triangular elimination failed to cancel the top term")
        lie = {k: v for k, v in lie.items() if not v.is_zero}
        return DiffOp("lie", lie, self.phi, self.psi)

    def normal_form(self, target):
        """Exact rewriting into the requested normal form.

        Requires phi' to lie in the infinite-order membership class of phi,
        which keeps every recurrence coefficient in the ring.
        """
        check_weight_admissible(self.phi)
        if target == "lie":
            return self.to_lie()
        if target == "monomial":
            return self.to_monomial()
        if target == "raw":
            return self.to_raw()
        raise ValueError(f"unknown target {target!r}")

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        if not self._same_weights(other):
            raise PreconditionError("operators built over different weights")
        a, b = self.to_raw(), other.to_raw()
        merged = dict(a.coeffs)
        for key, c in b.coeffs.items():
            _raw_add(merged, key[0], key[1], c)
        return DiffOp("raw", merged, self.phi, self.psi)

    def __sub__(self, other):
        return self + (other * -1)

    def __mul__(self, scalar):
        return DiffOp(self.form, {k: c * scalar
                                  for k, c in self.coeffs.items()},
                      self.phi, self.psi)

    __rmul__ = __mul__

    def apply(self, f):
        """Exact action on a cylinder function."""
        f = _as_cylinder(f, self.domain)
        raw = self.to_raw()
        out = CylinderFunction.zero(self.domain)
        for (i, j), b in raw.coeffs.items():
            g = f
            for _ in range(j):
                g = g.d_theta()
            for _ in range(i):
                g = g.d_t()
            out = out + b * g
        return out

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        if not self._same_weights(other):
            return False
        return self.to_raw().coeffs == other.to_raw().coeffs

    __hash__ = None

    def to_text(self):
        """Render the operator in its current form."""
        if not self.coeffs:
            return "0"
        if self.form == "raw":
            head = {"t": "d_t", "theta": "d_theta"}
            parts = []
            for (i, j) in sorted(self.coeffs, key=lambda k: (k[0] + k[1], k[0]),
                                 reverse=True):
                c = self.coeffs[(i, j)]
                piece = f"[{c!r}]"
                if i:
                    piece += f" d_t^{i}" if i > 1 else " d_t"
                if j:
                    piece += f" d_theta^{j}" if j > 1 else " d_theta"
                parts.append(piece)
            return " + ".join(parts)
        sym = ("X", "Y") if self.form == "lie" else ("phi d_t", "psi d_theta")
        parts = []
        for (i, j) in sorted(self.coeffs, key=lambda k: (k[0] + k[1], k[0]),
                             reverse=True):
            c = self.coeffs[(i, j)]
            piece = f"[{c!r}]"
            if i:
                piece += f" {sym[0]}^{i}" if i > 1 else f" {sym[0]}"
            if j:
                piece += f" {sym[1]}^{j}" if j > 1 else f" {sym[1]}"
            parts.append(piece)
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOp({self.form}: {self.to_text()})"


def _raw_add(raw, i, j, c):
    key = (i, j)
    cur = raw.get(key)
    new = c if cur is None else cur + c
    if new.is_zero:
        raw.pop(key, None)
    else:
        raw[key] = new


def _compose_terms(i1, j1, b1, i2, j2, b2):
    """Raw term composition  b1 dt^{i1} dtheta^{j1} o b2 dt^{i2} dtheta^{j2}."""
    out = {}
    for m in range(i1 + 1):
        # dtheta passes through radial-in-t derivatives; apply all j1 of them
        # to b2 (each multiplies Fourier mode mu by i*mu) split by Leibniz
        for l in range(j1 + 1):
            g = b2
            for _ in range(l):
                g = g.d_theta()
            for _ in range(m):
                g = g.d_t()
            c = b1 * g * (comb(i1, m) * comb(j1, l))
            if not c.is_zero:
                key = (i1 - m + i2, j1 - l + j2)
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
    return out


def check_weight_admissible(phi):
    """phi' must lie in C_phi^(infinity); raise otherwise."""
    w = phi if isinstance(phi, Weight) else Weight(phi)
    res = membership_order(w.profile.derivative(), w, math.inf)
    if not res.is_member:
        raise PreconditionError(
            "phi' does not lie in the infinite-order class of phi; "
            "normal forms would leave the ring")
    return w


def op_compose(A, B):
    """Exact composition by Leibniz expansion of the raw forms."""
    if not (A.phi == B.phi and A.psi == B.psi):
        raise PreconditionError("operators built over different weights")
    a, b = A.to_raw(), B.to_raw()
    raw = {}
    for (i1, j1), b1 in a.coeffs.items():
        for (i2, j2), b2 in b.coeffs.items():
            for (i, j), c in _compose_terms(i1, j1, b1, i2, j2, b2).items():
                _raw_add(raw, i, j, c)
    return DiffOp("raw", raw, A.phi, A.psi)


def op_commutator(A, B):
    return op_compose(A, B) - op_compose(B, A)


def op_apply(A, f):
    return A.apply(f)


# -- Lie-Rinehart axioms ---------------------------------------------------


class VectorField:
    """First-order field u*X + v*Y with ring (cylinder) coefficients."""

    def __init__(self, u, v, phi, psi):
        self.phi = phi if isinstance(phi, Weight) else Weight(phi)
        self.psi = psi if isinstance(psi, Weight) else Weight(psi)
        self.u = _as_cylinder(u, self.phi.domain)
        self.v = _as_cylinder(v, self.phi.domain)

    def as_op(self):
        return DiffOp("lie", {(1, 0): self.u, (0, 1): self.v},
                      self.phi, self.psi)

    def act(self, f):
        return self.as_op().apply(f)

    def bracket(self, other):
        """[Z, W] as a VectorField (the commutator has order <= 1)."""
        C = op_commutator(self.as_op(), other.as_op()).to_lie()
        dom = self.phi.domain
        zero = CylinderFunction.zero(dom)
        for (i, j) in C.coeffs:
            if i + j > 1:
                raise PreconditionError("bracket left first-order fields")
        return VectorField(C.coeffs.get((1, 0), zero),
                           C.coeffs.get((0, 1), zero), self.phi, self.psi)

    def scale(self, a):
        a = _as_cylinder(a, self.phi.domain)
        return VectorField(a * self.u, a * self.v, self.phi, self.psi)


def random_lie_rinehart_samples(phi, psi, count, seed=0):
    """Random fields and functions for the axiom checker.

    Coefficients are dyadic rationals so that every product, including the
    complex factors from Fourier derivatives, is exact in floating point and
    the axioms cancel to literal zero.
    """
    import random as _random

    rng = _random.Random(seed)
    w_phi = phi if isinstance(phi, Weight) else Weight(phi)
    w_psi = psi if isinstance(psi, Weight) else Weight(psi)
    dom = w_phi.domain
    from fractions import Fraction

    def rnd_rf():
        coeff = Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4]))
        p = Fraction(rng.randint(0, 4), 2)
        q = -rng.randint(0, 2) if dom == HALF_LINE else rng.randint(0, 2)
        return RadialFunction.term(coeff, p, q, domain=dom)

    def rnd_cf():
        return CylinderFunction({rng.randint(-1, 1): rnd_rf()}, domain=dom)

    samples = []
    for _ in range(count):
        samples.append({
            "Z": VectorField(rnd_cf(), rnd_cf(), w_phi, w_psi),
            "W": VectorField(rnd_cf(), rnd_cf(), w_phi, w_psi),
            "U": VectorField(rnd_cf(), rnd_cf(), w_phi, w_psi),
            "a": rnd_cf(),
            "f": rnd_cf(),
        })
    return samples


def lie_rinehart_check(phi, psi, samples):
    """Verify the Lie-Rinehart axioms exactly on sample data.

    ``samples`` is a list of dicts with keys Z, W, U (VectorFields) and
    a, f (CylinderFunctions).  Each axiom is checked by exact symbolic
    equality; the report maps axiom name to (passed, counterexample count).
    """
    results = {}

    def record(name, ok_list):
        fails = sum(1 for ok in ok_list if not ok)
        results[name] = (fails == 0, fails)

    jacobi, leibniz, module_act, module_br, derivation = [], [], [], [], []
    for s in samples:
        Z, W, U = s["Z"], s["W"], s["U"]
        a, f = s["a"], s["f"]
        j1 = Z.bracket(W).bracket(U).act(f)
        j2 = W.bracket(U).bracket(Z).act(f)
        j3 = U.bracket(Z).bracket(W).act(f)
        jacobi.append((j1 + j2 + j3).is_zero)
        # [Z, aW] = Z(a) W + a [Z, W]
        lhs = Z.bracket(W.scale(a))
        rhs = W.scale(Z.act(a)).as_op() + Z.bracket(W).scale(a).as_op()
        leibniz.append(lhs.as_op() == rhs)
        module_act.append(Z.scale(a).act(f) == a * Z.act(f))
        lhs2 = Z.scale(a).bracket(W)
        rhs2 = (Z.bracket(W).scale(a).as_op()
                - Z.scale(W.act(a)).as_op())
        module_br.append(lhs2.as_op() == rhs2)
        derivation.append(Z.act(a * f) == Z.act(a) * f + a * Z.act(f))
    record("jacobi", jacobi)
    record("leibniz", leibniz)
    record("module_action", module_act)
    record("module_bracket", module_br)
    record("derivation", derivation)
    return results


# -- symbols ---------------------------------------------------------------


def principal_symbol(A):
    """Top-order symbol in the rescaled covariables (xi_hat, eta_hat).

    Returns a map (i, j) -> CylinderFunction with i + j = order, representing
    sum c_{ij} (i xi_hat)^i (i eta_hat)^j.
    """
    mono = A.to_monomial()
    ordr = mono.order
    return {key: c for key, c in mono.coeffs.items() if sum(key) == ordr}


def is_elliptic(A, t_samples=64, circle_samples=64):
    """No zeros of the principal symbol on the unit covariable circle,
    sampled over a log grid in t plus both endpoint limits."""
    sym = principal_symbol(A)
    if not sym:
        return False
    dom = A.domain
    if dom == HALF_LINE:
        ts = np.logspace(-6, 6, t_samples)
    else:
        u = np.linspace(-14.0, 14.0, t_samples)
        ts = 1.0 / (1.0 + np.exp(-u))
    thetas = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    alphas = np.linspace(0.0, 2.0 * math.pi, circle_samples, endpoint=False)

    def sym_min(coeff_at):
        m = math.inf
        for al in alphas:
            xi, eta = math.cos(al), math.sin(al)
            v = sum(c * (1j * xi) ** i * (1j * eta) ** j
                    for (i, j), c in coeff_at.items())
            m = min(m, abs(v))
        return m

    for t in ts:
        for th in thetas:
            at = {key: complex(c(float(t), float(th)))
                  for key, c in sym.items()}
            if sym_min(at) <= 1e-9:
                return False
    # endpoint limits of the radial parts
    for end in ("zero", "far"):
        at = {}
        for key, c in sym.items():
            val = complex(0)
            for m, f in c.modes.items():
                lim = f.limit(end)
                if not math.isfinite(abs(lim)):
                    return False
                val += lim  # worst case theta = 0 alignment; modes add
            at[key] = val
        if sym_min(at) <= 1e-9:
            return False
    return True


class RationalSymbol:
    """Quotient of polynomials in the covariable xi with ring coefficients.

    ``num`` and ``den`` are coefficient lists indexed by the power of xi.
    The denominator must not vanish for real xi on the symbol domain.
    """

    __slots__ = ("num", "den", "domain")

    def __init__(self, num, den, domain=HALF_LINE):
        self.num = _trim_poly([_as_radial(c, domain) for c in num])
        self.den = _trim_poly([_as_radial(c, domain) for c in den])
        if not self.den:
            raise ZeroDivisionError("zero denominator")
        self.domain = domain

    @classmethod
    def from_poly(cls, coeffs, domain=HALF_LINE):
        return cls(coeffs, [RadialFunction.const(1, domain=domain)],
                   domain=domain)

    @property
    def order(self):
        if not self.num:
            return -math.inf
        return (len(self.num) - 1) - (len(self.den) - 1)

    @property
    def is_zero(self):
        return not self.num

    def __add__(self, other):
        other = self._coerce(other)
        num = _poly_add(_poly_mul(self.num, other.den),
                        _poly_mul(other.num, self.den))
        return RationalSymbol(num, _poly_mul(self.den, other.den),
                              domain=self.domain)

    def __sub__(self, other):
        return self + (self._coerce(other) * -1)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalSymbol):
            return RationalSymbol(_poly_mul(self.num, other.num),
                                  _poly_mul(self.den, other.den),
                                  domain=self.domain)
        num = [c * other for c in self.num]
        return RationalSymbol(num, self.den, domain=self.domain)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, RationalSymbol):
            return other
        return RationalSymbol([_as_radial(other, self.domain)],
                              [RadialFunction.const(1, domain=self.domain)],
                              domain=self.domain)

    def reciprocal(self):
        if self.is_zero:
            raise ZeroDivisionError("reciprocal of zero symbol")
        return RationalSymbol(self.den, self.num, domain=self.domain)

    def d_xi(self):
        """Partial derivative in the covariable (quotient rule)."""
        num = _poly_sub(_poly_mul(_poly_dxi(self.num), self.den),
                        _poly_mul(self.num, _poly_dxi(self.den)))
        return RationalSymbol(num, _poly_mul(self.den, self.den),
                              domain=self.domain)

    def D_s(self, phi):
        """D_s = -i d/ds acting on coefficients; in the t chart d/ds = X."""
        prof = phi.profile if isinstance(phi, Weight) else phi

        def dcoef(poly):
            return [(prof * c.derivative()) * (-1j) for c in poly]

        num = _poly_sub(_poly_mul(dcoef(self.num), self.den),
                        _poly_mul(self.num, dcoef(self.den)))
        return RationalSymbol(num, _poly_mul(self.den, self.den),
                              domain=self.domain)

    def evaluate(self, t, xi):
        n = _poly_eval(self.num, t, xi)
        d = _poly_eval(self.den, t, xi)
        return n / d

    def den_nonvanishing(self, t_samples=32):
        """Check that the denominator has no real-xi zeros.

        At each sampled radius the denominator is a polynomial in xi;
        its roots are computed and tested for proximity to the real axis.
        """
        if self.domain == HALF_LINE:
            ts = np.logspace(-5, 5, t_samples)
        else:
            u = np.linspace(-11.0, 11.0, t_samples)
            ts = 1.0 / (1.0 + np.exp(-u))
        for t in ts:
            coeffs = [complex(c(float(t))) for c in reversed(self.den)]
            while coeffs and abs(coeffs[0]) == 0:
                coeffs = coeffs[1:]
            if not coeffs:
                return False
            if len(coeffs) == 1:
                continue
            for root in np.roots(coeffs):
                if abs(root.imag) <= 1e-9 * max(1.0, abs(root.real)):
                    return False
        return True

    def __repr__(self):
        def fmt(poly):
            return " + ".join(f"({c.to_text()})*xi^{k}"
                              for k, c in enumerate(poly) if not c.is_zero)
        return f"RationalSymbol(({fmt(self.num)}) / ({fmt(self.den)}))"


def _as_radial(c, domain):
    if isinstance(c, RadialFunction):
        if c.domain != domain:
            raise DomainMismatchError("mixed base domains")
        return c
    return RadialFunction.const(c, domain=domain)


def _trim_poly(poly):
    while poly and poly[-1].is_zero:
        poly.pop()
    return poly


def _poly_add(a, b):
    n = max(len(a), len(b))
    out = []
    for k in range(n):
        if k < len(a) and k < len(b):
            out.append(a[k] + b[k])
        elif k < len(a):
            out.append(a[k])
        else:
            out.append(b[k])
    return out


def _poly_sub(a, b):
    return _poly_add(a, [-c for c in b])


def _poly_mul(a, b):
    if not a or not b:
        return []
    dom = a[0].domain if a else b[0].domain
    out = [RadialFunction.zero(domain=dom)
           for _ in range(len(a) + len(b) - 1)]
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return out


def _poly_dxi(a):
    return [a[k] * k for k in range(1, len(a))]


def _poly_eval(poly, t, xi):
    val = complex(0)
    for c in reversed(poly):
        val = val * xi + complex(c(t))
    return val


def radial_symbol(A):
    """Full symbol of a radial operator in the flow coordinate.

    The operator must be in lie form with radial coefficients; X = d/ds there,
    so A = sum a_i X^i has symbol sum a_i (i xi)^i.
    """
    lie = A.to_lie() if A.form != "lie" else A
    if not lie.is_radial:
        raise PreconditionError("radial symbol needs a radial operator")
    dom = A.domain
    mmax = max((i for (i, _) in lie.coeffs), default=0)
    poly = [RadialFunction.zero(domain=dom) for _ in range(mmax + 1)]
    for (i, _), c in lie.coeffs.items():
        poly[i] = poly[i] + c.radial_part() * (1j ** i)
    return RationalSymbol.from_poly(poly, domain=dom)


class PoweredSymbol:
    """Rational symbol of the special shape  num / base^power.

    The parametrix recursion only ever produces denominators that are powers
    of the full symbol, so pinning the base keeps every operation polynomial
    instead of compounding unreduced quotients.
    """

    __slots__ = ("num", "base", "power", "domain")

    def __init__(self, num, base, power, domain=HALF_LINE):
        self.num = _trim_poly([_as_radial(c, domain) for c in num])
        self.base = [_as_radial(c, domain) for c in base]
        self.power = int(power)
        self.domain = domain

    @property
    def is_zero(self):
        return not self.num

    @property
    def order(self):
        if not self.num:
            return -math.inf
        return (len(self.num) - 1) - self.power * (len(self.base) - 1)

    def _align(self, other):
        r = max(self.power, other.power)
        a = self.num
        for _ in range(r - self.power):
            a = _poly_mul(a, self.base)
        b = other.num
        for _ in range(r - other.power):
            b = _poly_mul(b, self.base)
        return a, b, r

    def __add__(self, other):
        a, b, r = self._align(other)
        return PoweredSymbol(_poly_add(a, b), self.base, r, self.domain)

    def __sub__(self, other):
        a, b, r = self._align(other)
        return PoweredSymbol(_poly_sub(a, b), self.base, r, self.domain)

    def __mul__(self, other):
        if isinstance(other, PoweredSymbol):
            return PoweredSymbol(_poly_mul(self.num, other.num), self.base,
                                 self.power + other.power, self.domain)
        return PoweredSymbol([c * other for c in self.num], self.base,
                             self.power, self.domain)

    __rmul__ = __mul__

    def d_xi(self):
        num = _poly_sub(_poly_mul(_poly_dxi(self.num), self.base),
                        _poly_mul(self.num,
                                  [c * self.power for c in _poly_dxi(self.base)]))
        return PoweredSymbol(num, self.base, self.power + 1, self.domain)

    def D_s(self, phi):
        prof = phi.profile if isinstance(phi, Weight) else phi

        def dcoef(poly):
            return [(prof * c.derivative()) * (-1j) for c in poly]

        num = _poly_sub(_poly_mul(dcoef(self.num), self.base),
                        _poly_mul(self.num,
                                  [c * self.power for c in dcoef(self.base)]))
        return PoweredSymbol(num, self.base, self.power + 1, self.domain)

    def evaluate(self, t, xi):
        return (_poly_eval(self.num, t, xi)
                / _poly_eval(self.base, t, xi) ** self.power)

    def to_rational(self):
        den = [RadialFunction.const(1, domain=self.domain)]
        for _ in range(self.power):
            den = _poly_mul(den, self.base)
        return RationalSymbol(self.num, den, domain=self.domain)

    def __repr__(self):
        return (f"PoweredSymbol(deg {len(self.num) - 1} num / "
                f"base^{self.power})")


class ParametrixExpansion:
    """Finite symbol parametrix: terms q_0 ... q_{N-1} and the remainder."""

    def __init__(self, terms, remainder, remainder_order, symbol):
        self.terms = terms
        self.remainder = remainder
        self.remainder_order = remainder_order
        self.symbol = symbol

    def total(self):
        if not self.terms:
            return None
        out = self.terms[0]
        for q in self.terms[1:]:
            out = out + q
        return out


def symbol_sharp(sigma, q, phi, max_alpha):
    """Asymptotic composition sigma # q = sum_alpha (1/alpha!) d_xi^alpha sigma
    * D_s^alpha q.  Finite because sigma is polynomial in xi."""
    out = None
    dsig = sigma
    dq = q
    fact = 1
    for alpha in range(max_alpha + 1):
        if alpha > 0:
            dsig = dsig.d_xi()
            dq = dq.D_s(phi)
            fact *= alpha
        if dsig.is_zero:
            break
        term = dsig * dq * (1.0 / fact)
        out = term if out is None else out + term
    return out


def parametrix_1d(A, N):
    """N-term symbolic parametrix of an elliptic radial operator.

    Works in the flow coordinate where X = d/ds.  Returns a
    ParametrixExpansion with ord(q_k) = -m - k and the exact remainder
    symbol E = 1 - sigma_A # (sum q_k).
    """
    lie = A.normal_form("lie") if A.form != "lie" else A
    sigma = radial_symbol(lie)
    m = len(sigma.num) - 1
    lead = sigma.num[-1] if sigma.num else None
    if lead is None or not _nonvanishing_on_closure(lead):
        raise PreconditionError("operator is not elliptic on its radial sector")
    if not sigma.reciprocal().den_nonvanishing():
        raise PreconditionError(
            "full symbol vanishes for real xi; shift the operator off its "
            "spectrum before building a parametrix")
    base = sigma.num
    dom = A.domain
    sigma_p = PoweredSymbol(base, base, 0, domain=dom)
    q0 = PoweredSymbol([RadialFunction.const(1, domain=dom)], base, 1,
                       domain=dom)
    one = PoweredSymbol([RadialFunction.const(1, domain=dom)], base, 0,
                        domain=dom)
    if N <= 0:
        return ParametrixExpansion([], one, m, sigma)
    phi = lie.phi
    terms = [q0]
    E = one - symbol_sharp(sigma_p, q0, phi, m)
    for _ in range(1, N):
        qk = q0 * E
        terms.append(qk)
        E = E - symbol_sharp(sigma_p, qk, phi, m)
    return ParametrixExpansion(terms, E, m - 1 - N, sigma)


def _nonvanishing_on_closure(f, samples=64):
    if f.domain == HALF_LINE:
        ts = np.logspace(-6, 6, samples)
    else:
        u = np.linspace(-14.0, 14.0, samples)
        ts = 1.0 / (1.0 + np.exp(-u))
    for t in ts:
        if abs(complex(f(float(t)))) <= 1e-9:
            return False
    for end in ("zero", "far"):
        v = f.limit(end)
        if not math.isfinite(abs(v)) or abs(v) <= 1e-9:
            return False
    return True
