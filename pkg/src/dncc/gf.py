"""Exact arithmetic in GF(2^L) for 1 <= L <= 16.

Field elements are plain Python ints in [0, 2^L), bit i holding the
coefficient of x^i in the polynomial basis.  A `GF` instance carries the
extension degree and the defining polynomial; all arithmetic goes through
its methods.

For L <= 8 multiplication and inversion use log/antilog tables built on a
searched generator of the multiplicative group (the defining polynomial is
only required to be irreducible, so x itself need not generate).  Above
L = 8 multiplication falls back to carry-less shift-and-reduce and
inversion to exponentiation; results are exact either way.
"""

from __future__ import annotations

# Default defining polynomial per extension degree, as a bitmask with bit i
# set for the x^i term.  All entries are irreducible over GF(2); kept fixed
# so runs are reproducible without a polynomial in the config.
DEFAULT_POLYS = {
    1: 0b11,                 # x + 1
    2: 0b111,                # x^2 + x + 1
    3: 0b1011,               # x^3 + x + 1
    4: 0b10011,              # x^4 + x + 1
    5: 0b100101,             # x^5 + x^2 + 1
    6: 0b1000011,            # x^6 + x + 1
    7: 0b10001001,           # x^7 + x^3 + 1
    8: 0b100011011,          # x^8 + x^4 + x^3 + x + 1
    9: 0b1000010001,         # x^9 + x^4 + 1
    10: 0b10000001001,       # x^10 + x^3 + 1
    11: 0b100000000101,      # x^11 + x^2 + 1
    12: 0b1000001010011,     # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,    # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,   # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}

_TABLE_MAX_L = 8


def _poly_mod(a: int, b: int) -> int:
    """Remainder of a divided by b, both GF(2)[x] bitmasks, b != 0."""
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def is_irreducible(poly: int, degree: int) -> bool:
    """Trial-division irreducibility test for a degree-`degree` bitmask."""
    if poly.bit_length() - 1 != degree:
        return False
    if degree >= 1 and not (poly & 1):
        return False  # divisible by x
    for d in range(1, degree // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, cand) == 0:
                return False
    return True


class GF:
    """Arithmetic context for GF(2^L) with a fixed defining polynomial.

    Instances are immutable after construction and safe to share across
    workers.  Two contexts compare equal iff they have the same degree and
    polynomial.
    """

    def __init__(self, L: int, poly: int | None = None):
        if not 1 <= L <= 16:
            raise ValueError(f"extension degree must be in [1, 16], got {L}")
        if poly is None:
            poly = DEFAULT_POLYS[L]
        if poly.bit_length() - 1 != L:
            raise ValueError(
                f"polynomial 0b{poly:b} does not have degree {L} (bit {L} unset)"
            )
        if not is_irreducible(poly, L):
            raise ValueError(f"polynomial 0b{poly:b} is reducible over GF(2)")
        self.L = L
        self.poly = poly
        self.q = 1 << L
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        if L <= _TABLE_MAX_L:
            self._build_tables()

    # -- construction helpers -------------------------------------------

    def _mul_noref(self, a: int, b: int) -> int:
        """Shift-and-reduce product; independent of the lookup tables."""
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            b >>= 1
            a <<= 1
            if a & self.q:
                a ^= self.poly
        return acc

    def _order_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_noref(r, a)
            a = self._mul_noref(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        """Smallest element generating the multiplicative group."""
        n = self.q - 1
        primes, m = [], n
        f = 2
        while f * f <= m:
            if m % f == 0:
                primes.append(f)
                while m % f == 0:
                    m //= f
            f += 1
        if m > 1:
            primes.append(m)
        for g in range(2, self.q):
            if all(self._order_pow(g, n // p) != 1 for p in primes):
                return g
        return 1  # q = 2: trivial group

    def _build_tables(self) -> None:
        g = self._find_generator()
        n = self.q - 1
        exp = [1] * n
        log = [0] * self.q
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._mul_noref(x, g)
        self._exp = exp
        self._log = log

    # -- field operations ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        """Sum of two elements (XOR; subtraction is identical)."""
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        """Product of two elements modulo the defining polynomial."""
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            n = self.q - 1
            return self._exp[(self._log[a] + self._log[b]) % n]
        return self._mul_noref(a, b)

    def inv(self, a: int) -> int:
        """Multiplicative inverse; zero has none."""
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^L)")
        if self._exp is not None:
            n = self.q - 1
            return self._exp[(n - self._log[a]) % n]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def validate(self, a: int) -> int:
        """Check that `a` is a value of this field and return it."""
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise ValueError(f"{a!r} is not an element of GF(2^{self.L})")
        return a

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GF) and (self.L, self.poly) == (other.L, other.poly)

    def __hash__(self) -> int:
        return hash((self.L, self.poly))

    def __repr__(self) -> str:
        return f"GF(L={self.L}, poly=0b{self.poly:b})"
