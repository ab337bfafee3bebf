"""Small finite fields GF(p^k) backed by log/antilog tables.

An element is an int 0 <= a < p^k whose base-p digits are the coefficients
of a polynomial in the generator w (digit i multiplies w^i).  The modulus of
GF(p^k) is the first primitive monic polynomial of degree k over GF(p) in the
order of its integer encoding sum c_i p^i (lowest coefficients first); it is
recorded in every report for reproducibility.  Prime-subfield elements are
plain residues 0..p-1.

Scalar operations take and return ints; the ``v``-prefixed methods act
elementwise on numpy integer arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["FiniteField", "GF", "parse_field_spec"]

_MAX_ORDER = 1 << 16
_ADD_TABLE_MAX = 729


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """(p, k) with q = p^k, or ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k = 0
    m = q
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


def _power_table(p: int, k: int, modulus: tuple[int, ...]) -> list[int] | None:
    """Successive powers of w as ints, or None if w is not primitive."""
    q = p**k
    digits = [1] + [0] * (k - 1)  # w^0
    powers = []
    for _ in range(q - 1):
        value = 0
        for i in reversed(range(k)):
            value = value * p + digits[i]
        powers.append(value)
        # multiply by w, reduce with w^k = -(c_0 + ... + c_{k-1} w^{k-1})
        top = digits[-1]
        digits = [0] + digits[:-1]
        if top:
            digits = [(d - top * c) % p for d, c in zip(digits, modulus[:k])]
        if digits == [1] + [0] * (k - 1):
            break
    if len(powers) != q - 1 or len(set(powers)) != q - 1:
        return None
    return powers


class FiniteField:
    """GF(p^k) with a primitive modulus; see the module docstring for encoding."""

    def __init__(self, p: int, k: int = 1):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValueError("degree must be at least 1")
        if p**k > _MAX_ORDER:
            raise ValueError(f"GF({p}^{k}) is too large for table arithmetic")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus, powers = self._find_modulus()
        q = self.q
        self._exp = powers + powers  # doubled so log a + log b needs no reduction
        self._log = [-1] * q
        for i, v in enumerate(powers):
            self._log[v] = i
        self.exp_table = np.array(self._exp, dtype=np.int64)
        self.log_table = np.array(self._log, dtype=np.int64)
        self.digits = np.array(
            [[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64
        )
        self._place = np.array([p**i for i in range(k)], dtype=np.int64)
        self._add_table = None
        if p != 2 and q <= _ADD_TABLE_MAX:
            self._add_table = [[self._add_digits(a, b) for b in range(q)] for a in range(q)]
        self._neg = [self._neg_digits(a) for a in range(q)]
        self.neg_table = np.array(self._neg, dtype=np.int64)

    def _find_modulus(self) -> tuple[tuple[int, ...], list[int]]:
        p, k = self.p, self.k
        for code in range(p**k):
            low = tuple((code // p**i) % p for i in range(k))
            if low[0] == 0:
                continue
            powers = _power_table(p, k, low + (1,))
            if powers is not None:
                return low + (1,), powers
        raise AssertionError("no primitive polynomial found")  # pragma: no cover

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    @property
    def characteristic(self) -> int:
        return self.p

    def spec(self) -> dict:
        return {"p": self.p, "k": self.k, "q": self.q, "modulus": list(self.modulus)}

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # -- scalar arithmetic ------------------------------------------------

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        out, place = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * place
            a //= p
            b //= p
            place *= p
        return out

    def _neg_digits(self, a: int) -> int:
        p = self.p
        out, place = 0, 1
        while a:
            out += ((-(a % p)) % p) * place
            a //= p
            place *= p
        return out

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def trace(self, a: int) -> int:
        """Absolute trace to GF(p), returned as a residue 0..p-1."""
        acc = 0
        x = a
        for _ in range(self.k):
            acc = self.add(acc, x)
            x = self.frobenius(x)
        assert acc < self.p
        return acc

    def quadratic_character(self, a: int) -> int:
        if self.p == 2:
            raise ValueError("quadratic character needs odd characteristic")
        if a == 0:
            return 0
        return 1 if self._log[a] % 2 == 0 else -1

    # -- vector arithmetic ------------------------------------------------

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(a, b)
        s = (self.digits[a] + self.digits[b]) % self.p
        return s @ self._place

    def vneg(self, a) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        zero = (a == 0) | (b == 0)
        idx = np.where(zero, 0, self.log_table[a] + self.log_table[b])
        return np.where(zero, 0, self.exp_table[idx])

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.exp_table[(self.q - 1 - self.log_table[a]) % (self.q - 1)]

    def vsquare(self, a) -> np.ndarray:
        return self.vmul(a, a)

    def vtrace(self, a) -> np.ndarray:
        acc = np.zeros_like(np.asarray(a, dtype=np.int64))
        x = np.asarray(a, dtype=np.int64)
        for _ in range(self.k):
            acc = self.vadd(acc, x)
            x = self.vpow(x, self.p)
        return acc

    def vpow(self, a, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        zero = a == 0
        idx = np.where(zero, 0, (self.log_table[a] * n) % (self.q - 1))
        return np.where(zero, 0, self.exp_table[idx])

    def vquadratic_character(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            raise ValueError("quadratic character needs odd characteristic")
        chi = np.where(self.log_table[a] % 2 == 0, 1, -1)
        return np.where(a == 0, 0, chi)

    # -- subfields ------------------------------------------------------------

    def embedding_from(self, small: "FiniteField") -> np.ndarray:
        """Array e with e[a] the image of ``small``'s element a in this field.

        The generator of ``small`` goes to the least root (as an int) of its
        modulus here.
        """
        if small.p != self.p or self.k % small.k:
            raise ValueError(f"{small} is not a subfield of {self}")
        if small.k == self.k:
            # same (p, k) always yields the same modulus
            return small.elements()
        return self._embed(small)

    def _embed(self, small: "FiniteField") -> np.ndarray:
        X = self.elements()
        acc = np.zeros_like(X)
        for c in reversed(small.modulus):
            acc = self.vadd(self.vmul(acc, X), c)
        roots = np.flatnonzero(acc == 0)
        if roots.size == 0:
            raise AssertionError("subfield modulus has no root")  # pragma: no cover
        r = int(roots[0])
        table = np.zeros(small.q, dtype=np.int64)
        for a in range(small.q):
            value = 0
            power = 1
            for i in range(small.k):
                d = (a // small.p**i) % small.p
                value = self.add(value, self.mul(d, power))
                power = self.mul(power, r)
            table[a] = value
        return table

    def extension(self, degree: int) -> "FiniteField":
        """GF(q^degree) as a table field (its own modulus, embed with embedding_from)."""
        return GF(self.p, self.k * degree)


@lru_cache(maxsize=None)
def GF(p: int, k: int = 1) -> FiniteField:
    return FiniteField(p, k)


def parse_field_spec(text: str) -> FiniteField:
    """'p^k', 'p' or a prime power 'q' -> field."""
    text = text.strip()
    if "^" in text:
        p, k = (int(x) for x in text.split("^", 1))
        return GF(p, k)
    p, k = prime_power(int(text))
    return GF(p, k)
