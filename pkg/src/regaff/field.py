"""Exact arithmetic in GF(p^ell) and in the rationals.

Elements of a finite field are stored as integer codes.  The code of
``c0 + c1*w + ... + c_{ell-1}*w^(ell-1)`` is ``c0 + c1*p + ... +
c_{ell-1}*p^(ell-1)``, so the base-p digits of a code are exactly its
coordinates over the prime field.  For ``ell == 1`` the code is the residue
itself.  Rational elements are :class:`fractions.Fraction` instances.

Every field exposes two layers of operations:

* scalar methods (``add``, ``mul``, ``inv`` ...) on single elements;
* vector methods (``vadd``, ``vmul``, ``matmul`` ...) on numpy arrays,
  used by the batched verification sweeps.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import FieldMismatchError, FormatError

# Log/antilog tables are built for fields up to this order.
MAX_TABLE_ORDER = 1 << 22


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a by b over F_p; both ascending coefficient lists, b monic."""
    r = [x % p for x in a]
    db = len(b) - 1
    for deg in range(len(r) - 1, db - 1, -1):
        c = r[deg]
        if c:
            shift = deg - db
            for i, bi in enumerate(b):
                r[shift + i] = (r[shift + i] - c * bi) % p
    r = r[:db]
    while r and r[-1] == 0:
        r.pop()
    return r


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg//2."""
    deg = len(modulus) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(modulus, list(low) + [1], p):
                return False
    return True


class FiniteField:
    """GF(p^ell) presented as F_p[w] / (modulus)."""

    is_finite = True

    def __init__(self, p: int, ell: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if ell < 1:
            raise ValueError("ell must be positive")
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != ell + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree ell")
        if any(not 0 <= c < p for c in modulus):
            raise ValueError("modulus coefficients must lie in [0, p)")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.ell = ell
        self.modulus = modulus
        self.order = p**ell
        self.characteristic = p
        self.zero = 0
        self.one = 1
        self.dtype = np.int64
        self._pw = np.array([p**i for i in range(ell)], dtype=np.int64)
        if ell > 1:
            self._build_tables()
        # spot check: the multiplicative group has order q - 1
        x = self.gen if self.gen != 0 else 1
        if self._poly_pow(self.coeffs(x), self.order - 1) != self.coeffs(1):
            raise ArithmeticError("multiplicative group order check failed")

    # -- polynomial helpers (construction time only) --------------------

    def _poly_mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        prod = [0] * (2 * self.ell - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        r = _poly_rem(prod, self.modulus, self.p)
        return tuple(r + [0] * (self.ell - len(r)))

    def _poly_pow(self, a: Sequence[int], e: int) -> tuple[int, ...]:
        result = self.coeffs(1)
        base = tuple(a)
        while e:
            if e & 1:
                result = self._poly_mul(result, base)
            base = self._poly_mul(base, base)
            e >>= 1
        return result

    def _build_tables(self) -> None:
        q = self.order
        if q > MAX_TABLE_ORDER:
            raise ValueError(f"GF({q}) exceeds the supported table size")
        one = self.coeffs(1)
        factors = _prime_factors(q - 1)
        for g in range(2, q):
            gc = self.coeffs(g)
            if all(self._poly_pow(gc, (q - 1) // r) != one for r in factors):
                break
        else:  # pragma: no cover - GF(q)* is cyclic
            raise ArithmeticError("no primitive element found")
        exp = [0] * (q - 1)
        log = [0] * q
        cur = one
        for i in range(q - 1):
            code = self.from_coeffs(cur)
            exp[i] = code
            log[code] = i
            cur = self._poly_mul(cur, gc)
        self.primitive = g
        self._exp = exp
        self._log = log
        self._exp_np = np.array(exp, dtype=np.int64)
        self._log_np = np.array(log, dtype=np.int64)

    # -- conversions ----------------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        x = int(x)
        out = []
        for _ in range(self.ell):
            x, c = divmod(x, self.p)
            out.append(c)
        return tuple(out)

    def from_coeffs(self, cs: Sequence[int]) -> int:
        if len(cs) != self.ell:
            raise ValueError(f"expected {self.ell} coefficients, got {len(cs)}")
        code = 0
        for c in reversed(cs):
            code = code * self.p + int(c) % self.p
        return code

    def prime_coords(self, x: int) -> tuple[int, ...]:
        """Coordinates of x over F_p in the basis 1, w, ..., w^(ell-1)."""
        return self.coeffs(x)

    @property
    def gen(self) -> int:
        """The class of the indeterminate w."""
        if self.ell == 1:
            return (-self.modulus[0]) % self.p
        return self.p

    def __call__(self, x: Any) -> int:
        if isinstance(x, FieldValue):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} element used in {self}")
            return x.value
        if isinstance(x, (bool, np.bool_)):
            return int(x)
        if isinstance(x, (int, np.integer)):
            # ints are codes; over a prime field any integer is reduced mod p
            if self.ell == 1:
                return int(x) % self.p
            if not 0 <= x < self.order:
                raise ValueError(f"code {x} out of range for {self}")
            return int(x)
        if isinstance(x, (tuple, list)):
            return self.from_coeffs(x)
        if isinstance(x, str):
            return self.decode(x)
        raise TypeError(f"cannot convert {x!r} to {self}")

    def value(self, x: Any) -> FieldValue:
        return FieldValue(self, self(x))

    def integer(self, n: int) -> int:
        """The image of the integer n, i.e. n * 1."""
        return int(n) % self.p

    def elements(self) -> range:
        return range(self.order)

    def prime_subfield(self) -> range:
        return range(self.p)

    def encode(self, x: int) -> str:
        return ".".join(str(c) for c in self.coeffs(x))

    def decode(self, s: str) -> int:
        parts = s.strip().split(".")
        if len(parts) != self.ell:
            raise FormatError(f"element {s!r} needs {self.ell} coefficient(s)")
        try:
            cs = [int(c) for c in parts]
        except ValueError:
            raise FormatError(f"bad field element {s!r}") from None
        if any(not 0 <= c < self.p for c in cs):
            raise FormatError(f"coefficient out of range in {s!r}")
        return self.from_coeffs(cs)

    def header(self) -> str:
        return f"FIELD {self.p} {self.ell} " + ",".join(map(str, self.modulus))

    def __repr__(self) -> str:
        if self.ell == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.ell})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteField)
            and (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ell, self.modulus))

    def __reduce__(self):
        return (FiniteField, (self.p, self.ell, self.modulus))

    # -- scalar arithmetic ---------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.ell == 1:
            return (a + b) % self.p
        return self.from_coeffs([x + y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.ell == 1:
            return -a % self.p
        return self.from_coeffs([-x for x in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.ell == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.ell == 1:
            return pow(a, -1, self.p)
        return self._exp[-self._log[a] % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.ell == 1:
            return pow(a, e, self.p)
        return self._exp[self._log[a] * e % (self.order - 1)]

    # -- vector arithmetic ---------------------------------------------

    def asarray(self, values: Any) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError("codes out of range")
        return arr

    def zeros(self, shape: Any) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def _digits(self, a: np.ndarray) -> np.ndarray:
        return (np.asarray(a)[..., None] // self._pw) % self.p

    def _undigits(self, d: np.ndarray) -> np.ndarray:
        return (d * self._pw).sum(axis=-1)

    def vadd(self, a: Any, b: Any) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if self.p == 2:
            return a ^ b
        if self.ell == 1:
            return (a + b) % self.p
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def vneg(self, a: Any) -> np.ndarray:
        a = np.asarray(a)
        if self.p == 2:
            return a
        if self.ell == 1:
            return (-a) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def vsub(self, a: Any, b: Any) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a: Any, b: Any) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if self.ell == 1:
            return (a * b) % self.p
        r = self._exp_np[(self._log_np[a] + self._log_np[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def vinv(self, a: Any) -> np.ndarray:
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        if self.ell == 1:
            return np.vectorize(lambda x: pow(int(x), -1, self.p), otypes=[np.int64])(a)
        return self._exp_np[(-self._log_np[a]) % (self.order - 1)]

    def vsum(self, a: Any, axis: int) -> np.ndarray:
        """Field sum along one axis."""
        a = np.asarray(a)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        if self.ell == 1:
            return a.sum(axis=axis) % self.p
        d = self._digits(a)
        ax = axis if axis >= 0 else axis - 1
        return self._undigits(d.sum(axis=ax) % self.p)

    def matmul(self, a: Any, b: Any) -> np.ndarray:
        """Matrix product over the field, broadcasting over leading axes."""
        a = np.asarray(a)
        b = np.asarray(b)
        if self.ell == 1:
            return np.matmul(a, b) % self.p
        prod = self.vmul(a[..., :, :, None], b[..., None, :, :])
        return self.vsum(prod, axis=-2)

    def random(self, rng: np.random.Generator, size: Any = None) -> Any:
        return rng.integers(0, self.order, size=size)


class RationalField:
    """The field of rational numbers with exact Fraction arithmetic."""

    is_finite = False
    characteristic = 0
    p = 0
    ell = None
    order = None
    modulus = None
    dtype = object

    def __init__(self) -> None:
        self.zero = Fraction(0)
        self.one = Fraction(1)
        self._to_frac = np.frompyfunc(Fraction, 1, 1)
        self._inv = np.frompyfunc(lambda x: 1 / x, 1, 1)

    def __call__(self, x: Any) -> Fraction:
        if isinstance(x, FieldValue):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} element used in {self}")
            return x.value
        if isinstance(x, str):
            return self.decode(x)
        if isinstance(x, (int, np.integer, Fraction)):
            return Fraction(x)
        raise TypeError(f"cannot convert {x!r} to {self}")

    def value(self, x: Any) -> FieldValue:
        return FieldValue(self, self(x))

    def integer(self, n: int) -> Fraction:
        return Fraction(n)

    def prime_coords(self, x: Any) -> tuple[int, ...]:
        raise ValueError("rationals have no finite prime-field coordinates")

    def elements(self):
        raise ValueError("the rationals cannot be enumerated")

    def encode(self, x: Fraction) -> str:
        return f"{x.numerator}/{x.denominator}"

    def decode(self, s: str) -> Fraction:
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad rational {s!r}") from None

    def header(self) -> str:
        return "FIELD Q"

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    def __reduce__(self):
        return (RationalField, ())

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    neg = staticmethod(lambda a: -a)
    mul = staticmethod(lambda a, b: a * b)

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a: Fraction, b: Fraction) -> Fraction:
        return a * self.inv(b)

    def pow(self, a: Fraction, e: int) -> Fraction:
        if e < 0:
            a, e = self.inv(a), -e
        return a**e

    def asarray(self, values: Any) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        return self._to_frac(arr).astype(object) if arr.ndim else Fraction(arr.item())

    def zeros(self, shape: Any) -> np.ndarray:
        return np.full(shape, self.zero, dtype=object)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def vadd(self, a: Any, b: Any) -> np.ndarray:
        return np.asarray(a, dtype=object) + np.asarray(b, dtype=object)

    def vneg(self, a: Any) -> np.ndarray:
        return -np.asarray(a, dtype=object)

    def vsub(self, a: Any, b: Any) -> np.ndarray:
        return np.asarray(a, dtype=object) - np.asarray(b, dtype=object)

    def vmul(self, a: Any, b: Any) -> np.ndarray:
        return np.asarray(a, dtype=object) * np.asarray(b, dtype=object)

    def vinv(self, a: Any) -> np.ndarray:
        a = np.asarray(a, dtype=object)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv(a).astype(object)

    def vsum(self, a: Any, axis: int) -> np.ndarray:
        return np.asarray(a, dtype=object).sum(axis=axis)

    def matmul(self, a: Any, b: Any) -> np.ndarray:
        return np.matmul(np.asarray(a, dtype=object), np.asarray(b, dtype=object))

    def random(self, rng: np.random.Generator, size: Any = None) -> Any:
        """Small random rationals (numerators in [-9, 9], denominators in [1, 9])."""
        if size is None:
            return Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
        num = rng.integers(-9, 10, size=size)
        den = rng.integers(1, 10, size=size)
        out = np.empty(np.shape(num), dtype=object)
        for idx in np.ndindex(out.shape):
            out[idx] = Fraction(int(num[idx]), int(den[idx]))
        return out


QQ = RationalField()

Field = FiniteField | RationalField


@functools.cache
def make_field(p: int, ell: int = 1) -> FiniteField:
    """GF(p^ell) with the lexicographically smallest monic irreducible modulus.

    Candidates are compared on their coefficients as written, highest degree
    first, so GF(8) gets x^3 + x + 1 and GF(16) gets x^4 + x + 1.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if ell < 1:
        raise ValueError("ell must be positive")
    for high in itertools.product(range(p), repeat=ell):
        modulus = high[::-1] + (1,)
        if is_irreducible(modulus, p):
            return FiniteField(p, ell, modulus)
    raise AssertionError(f"no irreducible polynomial of degree {ell} over F_{p}")


def field_of_order(q: int) -> FiniteField:
    """GF(q) for a prime power q."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    else:
        raise ValueError(f"{q} is not a prime power")
    ell, r = 0, q
    while r % p == 0:
        r //= p
        ell += 1
    if r != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return make_field(p, ell)


def parse_field_header(line: str) -> Field:
    """Inverse of ``header()``: ``FIELD p ell c0,...,cell`` or ``FIELD Q``."""
    parts = line.split()
    if len(parts) == 2 and parts[:2] == ["FIELD", "Q"]:
        return QQ
    if len(parts) != 4 or parts[0] != "FIELD":
        raise FormatError(f"bad field header {line!r}")
    try:
        p, ell = int(parts[1]), int(parts[2])
        modulus = [int(c) for c in parts[3].split(",")]
        return FiniteField(p, ell, modulus)
    except ValueError as exc:
        raise FormatError(f"bad field header {line!r}: {exc}") from None


@dataclass(frozen=True)
class FieldValue:
    """An element tagged with its field; operators refuse mixed fields."""

    field: Any
    value: Any

    def _other(self, other: Any) -> Any:
        if isinstance(other, FieldValue):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field(other)

    def __add__(self, other: Any) -> FieldValue:
        return FieldValue(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other: Any) -> FieldValue:
        return FieldValue(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other: Any) -> FieldValue:
        return FieldValue(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other: Any) -> FieldValue:
        return FieldValue(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> FieldValue:
        return FieldValue(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self) -> FieldValue:
        return FieldValue(self.field, self.field.neg(self.value))

    def __pow__(self, e: int) -> FieldValue:
        return FieldValue(self.field, self.field.pow(self.value, e))

    def inverse(self) -> FieldValue:
        return FieldValue(self.field, self.field.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.prime_coords(self.value)

    def __repr__(self) -> str:
        return f"{self.field}({self.field.encode(self.value)})"


def arith(op: str, x: FieldValue, y: FieldValue | None = None) -> FieldValue:
    """Apply one of ``add``, ``mul``, ``neg``, ``inv``."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown operation {op!r}")


def prime_coords(x: FieldValue) -> tuple[int, ...]:
    return x.coeffs


def enumerate_vectors(field: FiniteField, length: int) -> Iterable[tuple[int, ...]]:
    """All vectors of F^length, lexicographic on coordinate tuples."""
    return itertools.product(range(field.order), repeat=length)
