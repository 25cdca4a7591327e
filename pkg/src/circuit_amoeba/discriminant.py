"""The A-discriminant of a circuit, cleared to a binomial with integer exponents."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Tuple

import numpy as np

from .appearance import appearance_point, extremal_phases
from .core import CircuitPolynomial, CircuitSupport, normalize, support_matrices
from .errors import InnerCoefficientZero, LiftFailed, PreconditionFailed


@dataclass(frozen=True)
class DiscriminantBinomial:
    """c^N = rhs_constant * b_0^{e_0} b_1^{e_1} ... b_n^{e_n}.

    ``lhs_exponents`` and ``rhs_exponents`` are over (b_1, ..., b_n, c); the
    exponent of b_0 (1 after normalization) is kept separately.
    """

    clearing_exponent: int
    lhs_exponents: Tuple[int, ...]
    rhs_exponents: Tuple[int, ...]
    b0_exponent: int
    rhs_constant: Fraction

    def to_json(self) -> Dict:
        return {
            "N": self.clearing_exponent,
            "lhs_exponents": list(self.lhs_exponents),
            "rhs_exponents": list(self.rhs_exponents),
            "b0_exponent": self.b0_exponent,
            "rhs_constant": str(self.rhs_constant),
            "rhs_constant_float": float(self.rhs_constant),
            "equation": self.equation(),
        }

    def equation(self) -> str:
        n = len(self.rhs_exponents) - 1
        mono = "*".join(f"b{i + 1}" + (f"^{e}" if e != 1 else "")
                        for i, e in enumerate(self.rhs_exponents[:n]) if e)
        const = -self.rhs_constant
        sign = "+" if const >= 0 else "-"
        return f"c^{self.clearing_exponent} {sign} {abs(const)}*{mono} = 0"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def discriminant_binomial(support) -> DiscriminantBinomial:
    if isinstance(support, CircuitPolynomial):
        support = support.support
    sm = support_matrices(support)
    weights = sm.weights
    lam0 = 1 - sum(weights, Fraction(0))
    big_n = reduce(_lcm, [w.denominator for w in weights] + [lam0.denominator], 1)
    ratios = sm.hat_ratios
    k = 1 + sum(ratios, Fraction(0))
    const = Fraction(-k) ** big_n
    for w, r in zip(weights, ratios):
        e = big_n * w
        assert e.denominator == 1
        const *= (1 / r) ** int(e)
    n = support.n
    rhs = tuple(int(big_n * w) for w in weights) + (0,)
    lhs = (0,) * n + (big_n,)
    return DiscriminantBinomial(big_n, lhs, rhs, int(big_n * lam0), const)


def _log_polar(z: complex) -> Tuple[float, float]:
    return math.log(abs(z)), cmath.phase(z)


def discriminant_relative_residual(f: CircuitPolynomial) -> float:
    """|c^N - rhs| / max(|c^N|, |rhs|), evaluated in log-polar form."""
    db = discriminant_binomial(f.support)
    if f.c == 0:
        raise InnerCoefficientZero("the discriminant test needs c != 0")
    lc, ac = _log_polar(f.c)
    log_l, arg_l = db.clearing_exponent * lc, db.clearing_exponent * ac
    log_r, arg_r = _log_polar(complex(float(db.rhs_constant)))
    exps = (db.b0_exponent,) + db.rhs_exponents[:-1]
    for e, b in zip(exps, f.b):
        lb, ab = _log_polar(b)
        log_r += e * lb
        arg_r += e * ab
    # ratio q = rhs / lhs; relative residual is |1 - q| scaled by the larger side
    q = cmath.exp(complex(log_r - log_l, arg_r - arg_l))
    return abs(1 - q) if abs(q) <= 1 else abs(1 - 1 / q)


def in_discriminant(f: CircuitPolynomial, tol: float = 1e-9) -> bool:
    return discriminant_relative_residual(f) < tol


@dataclass(frozen=True)
class SingularPoint:
    z: np.ndarray
    residual_f: float
    residual_grad: Tuple[float, ...]
    scale: float

    @property
    def max_residual(self) -> float:
        return max((self.residual_f,) + self.residual_grad)


def _evaluate(f: CircuitPolynomial, z: np.ndarray) -> Tuple[float, List[float], float]:
    exps = f.exponents()
    terms = f.coefficients() * np.prod(z[None, :] ** exps, axis=1)
    val = complex(np.sum(terms))
    # z_k df/dz_k = sum_t e_tk * term_t; residual of df/dz_k is that divided by z_k
    grads = [abs(complex(np.sum(exps[:, k] * terms)) / z[k]) for k in range(f.n)]
    return abs(val), grads, float(np.sum(np.abs(terms)))


def singular_point(f: CircuitPolynomial, tol: float = 1e-9) -> SingularPoint:
    """Torus point where f and all partial derivatives vanish.

    At the singular point every outer monomial b_i z^alpha(i) equals the positive
    number det Mhat_i / det Mhat (1 for i = 0) and c z^y equals -(1 + sum of them).
    The moduli are therefore exp(a(f)); the arguments come from an extremal phase
    whose inner monomial argument matches arg(c).
    """
    f = normalize(f)
    if f.c == 0:
        raise InnerCoefficientZero("singular points need c != 0")
    if not in_discriminant(f, tol):
        raise PreconditionFailed("f is not in the discriminant")
    a = appearance_point(f).a_point
    y = np.array(f.support.y, dtype=float)
    best = None
    for phi in extremal_phases(f).phases:
        z = np.exp(a + 1j * phi)
        rf, rg, scale = _evaluate(f, z)
        key = max([rf] + rg) / scale
        if best is None or key < best[0]:
            best = (key, z, rf, rg, scale)
    key, z, rf, rg, scale = best
    if key > 1e-6:
        raise LiftFailed(f"no extremal phase lifts to a singular point (best residual {key:.3g})")
    return SingularPoint(z, rf, tuple(rg), scale)


def discriminant_roots(f: CircuitPolynomial) -> List[complex]:
    """All inner coefficients c putting f (with its outer coefficients) on the discriminant."""
    f = normalize(f)
    db = discriminant_binomial(f.support)
    rhs = complex(float(db.rhs_constant))
    for e, b in zip(db.rhs_exponents[:-1], f.b[1:]):
        rhs *= b ** e
    big_n = db.clearing_exponent
    mod = abs(rhs) ** (1.0 / big_n)
    arg = cmath.phase(rhs)
    return [cmath.rect(mod, (arg + 2 * math.pi * k) / big_n) for k in range(big_n)]
