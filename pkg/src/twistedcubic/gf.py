"""Finite fields GF(p^h) with exp/log tables.

Elements are encoded as integers in ``[0, q)``: the base-p digits of the
index are the coefficients of the representing polynomial, lowest degree
first.  Scalar arithmetic goes through :class:`FieldElement`; bulk
arithmetic on numpy index arrays goes through the ``v*`` methods of
:class:`FieldSpec`.
"""
from __future__ import annotations

import functools
import itertools
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1 << 16
# full q*q add/mul tables are built up to this order
_DENSE_TABLE_LIMIT = 256

# Conway polynomials, coefficients c0..ch (monic).
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class Reducible(FieldError):
    pass


class NoTableRoom(FieldError):
    pass


class SpecMismatch(FieldError):
    pass


class EvenField(FieldError):
    pass


class DivideByZero(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, h)`` with ``q == p**h``; raise NotPrime otherwise."""
    for p in range(2, q + 1):
        if q % p == 0:
            h, r = 0, q
            while r % p == 0:
                r //= p
                h += 1
            if r != 1 or not is_prime(p):
                raise NotPrime(f"{q} is not a prime power")
            return p, h
    raise NotPrime(f"{q} is not a prime power")


def _primitive_root(p: int) -> int:
    order = p - 1
    factors = {f for f in range(2, order + 1) if order % f == 0 and is_prime(f)}
    for g in range(1, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    raise AssertionError("unreachable")


def default_modulus(p: int, h: int) -> tuple[int, ...]:
    if h == 1:
        # Conway polynomial of degree one: x - g, g the least primitive root
        return ((-_primitive_root(p)) % p, 1)
    try:
        return CONWAY[(p, h)]
    except KeyError:
        raise FieldError(f"no shipped Conway polynomial for GF({p}^{h}); pass modulus") from None


# -- polynomials over GF(p), coefficient tuples lowest degree first ----------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    m = _trim([x % p for x in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        f = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    h = len(m) - 1
    for d in range(1, h // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not poly_mod(m, list(low) + [1], p):
                return False
    return True


def _digits(n: int, p: int, h: int) -> list[int]:
    out = []
    for _ in range(h):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _undigits(d: Sequence[int], p: int) -> int:
    return sum(c * p**i for i, c in enumerate(d))


class FieldSpec:
    """GF(p^h) with the polynomial basis given by ``modulus``.

    Construct through :func:`field_new` (or :func:`GF`), which validates the
    arguments; instances are immutable and compare equal when ``p``, ``h``
    and ``modulus`` agree.
    """

    def __init__(self, p: int, h: int, modulus: Sequence[int]):
        self.p = p
        self.h = h
        self.q = q = p**h
        self.modulus = tuple(modulus)
        r = q % 3
        self.xi = -1 if r == 2 else r
        self.dtype = np.uint8 if q <= 256 else np.uint16

        self._build_tables()
        self.rho = self._least_nonsquare() if p != 2 else None
        self.zero = FieldElement(self, 0)
        self.one = FieldElement(self, 1)

    # -- construction -----------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        p, h = self.p, self.h
        prod = poly_mul(_digits(a, p, h), _digits(b, p, h), p)
        return _undigits(poly_mod(prod, self.modulus, p), p)

    def _build_tables(self) -> None:
        q, p, h = self.q, self.p, self.h
        # digit-wise addition
        if p == 2:
            add_fn = lambda a, b: a ^ b  # noqa: E731
        elif h == 1:
            add_fn = lambda a, b: (a + b) % p  # noqa: E731
        else:
            add_fn = lambda a, b: _undigits(  # noqa: E731
                [(x + y) % p for x, y in zip(_digits(a, p, h), _digits(b, p, h))], p
            )
        self._add_fn = add_fn
        neg = [_undigits([(-x) % p for x in _digits(a, p, h)], p) for a in range(q)]
        self.neg_table = np.array(neg, dtype=np.int64)

        prim = self._find_primitive()
        self.primitive = prim
        base = np.zeros(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            base[i] = x
            log[x] = i
            x = self._slow_mul(x, prim)
        if x != 1:
            raise AssertionError("primitive element has wrong order")
        # doubled so that log sums need no reduction
        exp = np.concatenate([base, base, base[:1]])
        self.exp_table = exp
        self.log_table = log
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        self.inv_table = inv

        if q <= _DENSE_TABLE_LIMIT:
            idx = np.arange(q)
            if p == 2:
                add = idx[:, None] ^ idx[None, :]
            elif h == 1:
                add = (idx[:, None] + idx[None, :]) % p
            else:
                add = np.zeros((q, q), dtype=np.int64)
                for k in range(h):
                    dk = (idx // p**k) % p
                    add += ((dk[:, None] + dk[None, :]) % p) * p**k
            mul = exp[log[:, None] + log[None, :]]
            mul[0, :] = 0
            mul[:, 0] = 0
            self.add_table = add.astype(self.dtype)
            self.mul_table = mul.astype(self.dtype)
        else:
            self.add_table = None
            self.mul_table = None

    def _find_primitive(self) -> int:
        q = self.q
        if q == 2:
            return 1
        order = q - 1
        factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]

        def power(a: int, n: int) -> int:
            r, b = 1, a
            while n:
                if n & 1:
                    r = self._slow_mul(r, b)
                b = self._slow_mul(b, b)
                n >>= 1
            return r

        # with a Conway (primitive) modulus the class of x, index p, comes first
        candidates = ([self.p] if self.h > 1 else []) + list(range(2, q))
        for g in candidates:
            if all(power(g, order // f) != 1 for f in factors):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _least_nonsquare(self) -> int:
        half = (self.q - 1) // 2
        for x in range(1, self.q):
            if self.log_table[x] % 2 == 1:
                # Euler criterion: x^((q-1)/2) != 1 iff log x is odd
                assert int(self.exp_table[(self.log_table[x] * half) % (self.q - 1)]) != 1
                return x
        raise AssertionError("odd field without non-squares")  # pragma: no cover

    # -- scalar helpers (ints) --------------------------------------------

    def __call__(self, value: int) -> FieldElement:
        if isinstance(value, FieldElement):
            self._check(value)
            return value
        if not 0 <= value < self.q:
            raise ValueError(f"index {value} outside GF({self.q})")
        return FieldElement(self, int(value))

    def from_int(self, n: int) -> int:
        """Index of the image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def add(self, a: int, b: int) -> int:
        return self._add_fn(a, b)

    def sub(self, a: int, b: int) -> int:
        return self._add_fn(a, int(self.neg_table[b]))

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[self.log_table[a] + self.log_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZero("inverse of zero")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise DivideByZero("zero to a negative power")
            return 1 if n == 0 else 0
        return int(self.exp_table[(self.log_table[a] * n) % (self.q - 1)])

    def is_square(self, a: int) -> bool:
        return a == 0 or self.p == 2 or self.log_table[a] % 2 == 0

    def nonsquare(self) -> FieldElement:
        """Least-index non-square; only odd fields have one."""
        if self.rho is None:
            raise EvenField(f"every element of GF({self.q}) is a square")
        return FieldElement(self, self.rho)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.q)]

    # -- vectorised helpers (numpy index arrays) ---------------------------

    def vadd(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.add_table is not None:
            return self.add_table[a, b]
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.h == 1:
            return ((a + b) % self.p).astype(self.dtype)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for k in range(self.h):
            w = self.p**k
            out += (((a // w) % self.p + (b // w) % self.p) % self.p) * w
        return out.astype(self.dtype)

    def vneg(self, a):
        return self.neg_table[a].astype(self.dtype)

    def vsub(self, a, b):
        return self.vadd(a, self.neg_table[b].astype(self.dtype))

    def vmul(self, a, b):
        if self.mul_table is not None:
            return self.mul_table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        out[(a == 0) | (b == 0)] = 0
        return out.astype(self.dtype)

    def vinv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivideByZero("inverse of zero")
        return self.inv_table[a].astype(self.dtype)

    # -- identity ---------------------------------------------------------

    def _check(self, x: FieldElement) -> None:
        if x.field is not self and x.field != self:
            raise SpecMismatch(f"element of {x.field!r} used with {self!r}")

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.h, self.modulus) == (other.p, other.h, other.modulus)

    def __hash__(self):
        return hash((self.p, self.h, self.modulus))

    def __repr__(self):
        return f"GF({self.q})"

    def to_json(self) -> dict:
        return {"p": self.p, "h": self.h, "modulus": list(self.modulus)}


class FieldElement:
    __slots__ = ("field", "index")

    def __init__(self, field: FieldSpec, index: int):
        self.field = field
        self.index = index

    def _other(self, y) -> int:
        if isinstance(y, FieldElement):
            self.field._check(y)
            return y.index
        if isinstance(y, (int, np.integer)):
            return self.field.from_int(int(y))
        return NotImplemented

    def __add__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.add(self.index, b))

    __radd__ = __add__

    def __sub__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.sub(self.index, b))

    def __rsub__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.sub(b, self.index))

    def __mul__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.mul(self.index, b))

    __rmul__ = __mul__

    def __truediv__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.div(self.index, b))

    def __rtruediv__(self, y):
        b = self._other(y)
        return FieldElement(self.field, self.field.div(b, self.index))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.index, n))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.index))

    def is_square(self) -> bool:
        return self.field.is_square(self.index)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.index == other.index and self.field == other.field
        if isinstance(other, (int, np.integer)):
            return self.index == self.field.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.index))

    def __int__(self):
        return self.index

    __index__ = __int__

    def __bool__(self):
        return self.index != 0

    def __repr__(self):
        return f"{self.field!r}({self.index})"


def field_new(p: int, h: int = 1, modulus: Iterable[int] | None = None) -> FieldSpec:
    """Build GF(p^h).

    ``modulus`` is a monic degree-h coefficient list, lowest degree first;
    the shipped Conway polynomial is used when it is omitted.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if h < 1:
        raise FieldError("extension degree must be at least 1")
    if p**h > MAX_ORDER:
        raise NoTableRoom(f"GF({p}^{h}) exceeds the table limit {MAX_ORDER}")
    if modulus is None:
        m = default_modulus(p, h)
    else:
        m = tuple(int(c) % p for c in modulus)
        if len(m) != h + 1 or m[-1] != 1:
            raise FieldError("modulus must be monic of degree h")
    if not is_irreducible(m, p):
        raise Reducible(f"{m} is reducible over GF({p})")
    return FieldSpec(p, h, m)


@functools.lru_cache(maxsize=None)
def GF(q: int) -> FieldSpec:
    """Cached GF(q) with the default modulus."""
    p, h = prime_power(q)
    return field_new(p, h)


def nonsquare(F: FieldSpec) -> FieldElement:
    return F.nonsquare()


def elements(F: FieldSpec) -> list[FieldElement]:
    return F.elements()
