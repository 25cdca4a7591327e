"""Circuit supports and circuit polynomials.

A circuit polynomial has the shape

    f = b_0 z^a0 + b_1 z^a1 + ... + b_n z^an + c z^y

where a0..an span a full-dimensional lattice simplex and y is a lattice point
strictly inside it.  Most analysis routines want the normalized form
(a0 = 0, b_0 = 1); :func:`normalize` produces it and every public entry point
downstream calls it, so callers never have to.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from . import intlinalg as il
from .errors import (DegenerateSimplex, InvalidInput, MagnitudeTooLarge, PointNotInterior)

MAX_EXACT_DIM = 6
MAX_SCAN_DIM = 3
# keeps every n <= 6 determinant comfortably inside int64
MAX_ENTRY = 2**20

Vector = Tuple[int, ...]


def _as_vector(v, what) -> Vector:
    try:
        out = tuple(int(x) for x in v)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{what}: expected a list of integers") from exc
    for x, orig in zip(out, v):
        if isinstance(orig, float) and orig != x:
            raise InvalidInput(f"{what}: non-integer entry {orig}")
        if abs(x) > MAX_ENTRY:
            raise MagnitudeTooLarge(f"{what}: entry {x} exceeds {MAX_ENTRY}")
    return out


@dataclass(frozen=True)
class CircuitSupport:
    alphas: Tuple[Vector, ...]
    y: Vector

    @property
    def n(self) -> int:
        return len(self.y)

    @cached_property
    def barycentric_coords(self) -> Tuple[Fraction, ...]:
        """Exact barycentric coordinates (lambda_0, ..., lambda_n) of y."""
        return barycentric_of(self, self.y)

    @property
    def is_normalized(self) -> bool:
        return not any(self.alphas[0])

    def shifted(self, by: Sequence[int]) -> "CircuitSupport":
        return CircuitSupport(tuple(tuple(a - s for a, s in zip(al, by)) for al in self.alphas),
                              tuple(a - s for a, s in zip(self.y, by)))

    def exponents(self) -> np.ndarray:
        """(n+2) x n integer array: outer exponents in order, then y."""
        return np.array(list(self.alphas) + [self.y], dtype=np.int64).reshape(self.n + 2, self.n)

    def contains_lattice_point(self, p: Sequence[int]) -> bool:
        return all(l >= 0 for l in barycentric_of(self, p))


def barycentric_of(support: CircuitSupport, p: Sequence[int]) -> Tuple[Fraction, ...]:
    a0 = support.alphas[0]
    n = support.n
    cols = [[a[i] - a0[i] for a in support.alphas[1:]] for i in range(n)]
    rhs = [p[i] - a0[i] for i in range(n)]
    det = il.det_bareiss(cols)
    lam = [Fraction(il.det_bareiss(il.replace_column(cols, j, rhs)), det) for j in range(n)]
    return (1 - sum(lam),) + tuple(lam)


def validate_support(alphas: Sequence[Sequence[int]], y: Sequence[int]) -> CircuitSupport:
    """Check the simplex/interior-point conditions and build a support."""
    y = _as_vector(y, "y")
    n = len(y)
    if n < 1:
        raise InvalidInput("dimension must be at least 1")
    if n > MAX_EXACT_DIM:
        raise InvalidInput(f"dimension {n} exceeds the supported maximum {MAX_EXACT_DIM}")
    if len(alphas) != n + 1:
        raise InvalidInput(f"expected {n + 1} simplex vertices for n={n}, got {len(alphas)}")
    alphas = tuple(_as_vector(a, f"alphas[{i}]") for i, a in enumerate(alphas))
    for i, a in enumerate(alphas):
        if len(a) != n:
            raise InvalidInput(f"alphas[{i}] has length {len(a)}, expected {n}")
    a0 = alphas[0]
    cols = [[a[i] - a0[i] for a in alphas[1:]] for i in range(n)]
    if il.det_bareiss(cols) == 0:
        raise DegenerateSimplex("simplex vertices are affinely dependent")
    support = CircuitSupport(alphas, y)
    if not all(l > 0 for l in support.barycentric_coords):
        raise PointNotInterior(f"y={y} is not in the interior of the simplex")
    return support


def _as_complex(v, what) -> complex:
    try:
        z = complex(v)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{what}: not a number") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput(f"{what}: non-finite value")
    return z


@dataclass(frozen=True)
class CircuitPolynomial:
    support: CircuitSupport
    b: Tuple[complex, ...]
    c: complex = 0j

    def __post_init__(self):
        if len(self.b) != self.support.n + 1:
            raise InvalidInput(f"expected {self.support.n + 1} outer coefficients, got {len(self.b)}")
        object.__setattr__(self, "b", tuple(_as_complex(v, f"b[{i}]") for i, v in enumerate(self.b)))
        object.__setattr__(self, "c", _as_complex(self.c, "c"))
        for i, v in enumerate(self.b):
            if v == 0:
                raise InvalidInput(f"outer coefficient b[{i}] must be nonzero")

    @property
    def n(self) -> int:
        return self.support.n

    @property
    def is_normalized(self) -> bool:
        return self.support.is_normalized and self.b[0] == 1

    def coefficients(self) -> np.ndarray:
        """Coefficients aligned with :meth:`CircuitSupport.exponents`."""
        return np.array(list(self.b) + [self.c], dtype=complex)

    def exponents(self) -> np.ndarray:
        return self.support.exponents()

    def with_c(self, c: complex) -> "CircuitPolynomial":
        return CircuitPolynomial(self.support, self.b, c)

    def with_b(self, b: Sequence[complex]) -> "CircuitPolynomial":
        return CircuitPolynomial(self.support, tuple(b), self.c)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(np.sum(self.coefficients() * np.prod(z ** self.exponents(), axis=1)))


def circuit_polynomial(alphas, y, b, c=0j, normalized: bool = True) -> CircuitPolynomial:
    f = CircuitPolynomial(validate_support(alphas, y), tuple(b), c)
    return normalize(f) if normalized else f


def normalize(f: CircuitPolynomial) -> CircuitPolynomial:
    """Divide by b_0 z^alpha(0); idempotent and cheap when already normal."""
    if f.is_normalized:
        return f
    sup = f.support.shifted(f.support.alphas[0])
    b0 = f.b[0]
    return CircuitPolynomial(sup, tuple([1 + 0j] + [bi / b0 for bi in f.b[1:]]), f.c / b0)


@dataclass(frozen=True)
class SupportMatrices:
    m: Tuple[Tuple[int, ...], ...]
    det_m: int
    m_j: Tuple[Tuple[Tuple[int, ...], ...], ...]
    det_m_j: Tuple[int, ...]
    mhat: Tuple[Tuple[int, ...], ...]
    det_mhat: int
    mhat_j: Tuple[Tuple[Tuple[int, ...], ...], ...]
    det_mhat_j: Tuple[int, ...]

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        """det M_j / det M: barycentric weights of alpha(1..n)."""
        return tuple(Fraction(d, self.det_m) for d in self.det_m_j)

    @property
    def hat_ratios(self) -> Tuple[Fraction, ...]:
        """det Mhat_j / det Mhat, all strictly positive for interior y."""
        return tuple(Fraction(d, self.det_mhat) for d in self.det_mhat_j)


def _freeze(mat):
    return tuple(tuple(row) for row in mat)


def support_matrices(f) -> SupportMatrices:
    """Integer matrices M, M_j, Mhat, Mhat_j of a (normalized) support."""
    sup = f.support if isinstance(f, CircuitPolynomial) else f
    if not sup.is_normalized:
        sup = sup.shifted(sup.alphas[0])
    n = sup.n
    outer = sup.alphas[1:]
    m = [[outer[j][i] for j in range(n)] for i in range(n)]
    mhat = [[outer[j][i] - sup.y[i] for j in range(n)] for i in range(n)]
    m_j = [il.replace_column(m, j, sup.y) for j in range(n)]
    mhat_j = [il.replace_column(mhat, j, sup.y) for j in range(n)]
    return SupportMatrices(
        m=_freeze(m), det_m=il.det_bareiss(m),
        m_j=tuple(_freeze(x) for x in m_j), det_m_j=tuple(il.det_bareiss(x) for x in m_j),
        mhat=_freeze(mhat), det_mhat=il.det_bareiss(mhat),
        mhat_j=tuple(_freeze(x) for x in mhat_j), det_mhat_j=tuple(il.det_bareiss(x) for x in mhat_j),
    )


# ---------------------------------------------------------------------------
# JSON input

_KEYS = {"n", "alphas", "y", "b", "c"}


def _reject_constant(name):
    raise InvalidInput(f"non-finite number {name} is not allowed")


def _parse_complex(obj, path) -> complex:
    if not isinstance(obj, dict):
        raise InvalidInput(f"{path}: expected an object with 're' and 'im'")
    extra = set(obj) - {"re", "im"}
    if extra:
        raise InvalidInput(f"{path}: unknown key(s) {sorted(extra)}")
    parts = []
    for key in ("re", "im"):
        if key not in obj:
            raise InvalidInput(f"{path}: missing '{key}'")
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidInput(f"{path}.{key}: expected a number")
        if not math.isfinite(v):
            raise InvalidInput(f"{path}.{key}: non-finite value")
        parts.append(float(v))
    return complex(parts[0], parts[1])


def _parse_int_list(obj, path, n) -> List[int]:
    if not isinstance(obj, list):
        raise InvalidInput(f"{path}: expected a list")
    if len(obj) != n:
        raise InvalidInput(f"{path}: length {len(obj)} does not match n={n}")
    for i, v in enumerate(obj):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InvalidInput(f"{path}[{i}]: expected an integer")
    return list(obj)


def polynomial_from_dict(data: Dict[str, Any], normalized: bool = True) -> CircuitPolynomial:
    if not isinstance(data, dict):
        raise InvalidInput("$: expected a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise InvalidInput(f"$: unknown key(s) {sorted(unknown)}")
    missing = {"n", "alphas", "y", "b"} - set(data)
    if missing:
        raise InvalidInput(f"$: missing key(s) {sorted(missing)}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidInput("$.n: expected a positive integer")
    alphas = data["alphas"]
    if not isinstance(alphas, list) or len(alphas) != n + 1:
        raise InvalidInput(f"$.alphas: expected a list of {n + 1} exponent vectors")
    alphas = [_parse_int_list(a, f"$.alphas[{i}]", n) for i, a in enumerate(alphas)]
    y = _parse_int_list(data["y"], "$.y", n)
    b = data["b"]
    if not isinstance(b, list) or len(b) != n + 1:
        raise InvalidInput(f"$.b: expected {n + 1} coefficients (one per entry of alphas)")
    b = [_parse_complex(v, f"$.b[{i}]") for i, v in enumerate(b)]
    c = _parse_complex(data["c"], "$.c") if "c" in data else 0j
    return circuit_polynomial(alphas, y, b, c, normalized=normalized)


def loads_polynomial(text: str, normalized: bool = True) -> CircuitPolynomial:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return polynomial_from_dict(data, normalized=normalized)


def load_polynomial(path, normalized: bool = True) -> CircuitPolynomial:
    with open(path, encoding="utf-8") as fh:
        return loads_polynomial(fh.read(), normalized=normalized)


def complex_to_json(z: complex) -> Dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def polynomial_to_dict(f: CircuitPolynomial) -> Dict[str, Any]:
    return {
        "n": f.n,
        "alphas": [list(a) for a in f.support.alphas],
        "y": list(f.support.y),
        "b": [complex_to_json(v) for v in f.b],
        "c": complex_to_json(f.c),
    }


def angular_distance(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def phase(z: complex) -> float:
    """Argument in [0, 2pi)."""
    return cmath.phase(z) % (2 * math.pi)
