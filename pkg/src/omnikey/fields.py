"""Finite field arithmetic and the small linear algebra the protocols need.

Field elements are plain integer codes in [0, q).  For a prime field the
code is the residue itself; for GF(p^k) the base-p digits of the code are
the coefficients of the residue polynomial, digit i holding the x^i
coefficient.  Extension fields multiply through discrete log/antilog
tables built once at construction, so q is capped at 2**16.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputFormatError, SizeGuardError

MAX_ORDER = 1 << 16

__all__ = [
    "Field",
    "Matrix",
    "make_field",
    "field_from_order",
    "rank",
    "in_rowspan",
    "complete_basis",
    "next_prime",
]


def _is_prime(v: int) -> bool:
    if v < 2:
        return False
    if v % 2 == 0:
        return v == 2
    d = 3
    while d * d <= v:
        if v % d == 0:
            return False
        d += 2
    return True


def next_prime(v: int) -> int:
    """Smallest prime strictly greater than v."""
    c = v + 1
    while not _is_prime(c):
        c += 1
    return c


def _prime_factors(v: int) -> list[int]:
    out = []
    d = 2
    while d * d <= v:
        if v % d == 0:
            out.append(d)
            while v % d == 0:
                v //= d
        d += 1 if d == 2 else 2
    if v > 1:
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p); a polynomial is a tuple of digits, index i
# holding the x^i coefficient, with no trailing zeros except for the zero
# polynomial ().
# ---------------------------------------------------------------------------


def _poly_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], mod: Sequence[int], p: int) -> tuple[int, ...]:
    r = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(r) - 1 >= dm and r:
        if r[-1] == 0:
            r.pop()
            continue
        shift = len(r) - 1 - dm
        factor = (r[-1] * inv_lead) % p
        for i, mi in enumerate(mod):
            r[shift + i] = (r[shift + i] - factor * mi) % p
        r.pop()
    return _poly_trim(r)


def _poly_divides(d: Sequence[int], a: Sequence[int], p: int) -> bool:
    return not _poly_mod(a, d, p)


def _code_to_poly(code: int, p: int) -> tuple[int, ...]:
    digits = []
    while code:
        digits.append(code % p)
        code //= p
    return tuple(digits)


def _poly_to_code(poly: Sequence[int], p: int) -> int:
    code = 0
    for d in reversed(poly):
        code = code * p + d
    return code


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    k = len(poly) - 1
    if k < 1 or poly[-1] == 0:
        return False
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for low in range(p**deg):
            cand = list(_code_to_poly(low, p))
            cand += [0] * (deg - len(cand)) + [1]
            if _poly_divides(cand, poly, p):
                return False
    return True


def _canonical_modulus(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k, ordered by the integer code
    of the non-leading coefficients."""
    for low in range(p**k):
        cand = list(_code_to_poly(low, p))
        cand += [0] * (k - len(cand)) + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class Field:
    """Arithmetic over GF(p^k) on integer element codes."""

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise InputFormatError(f"characteristic {p} is not prime")
        if k < 1:
            raise InputFormatError("extension degree must be >= 1")
        q = p**k
        if q > MAX_ORDER:
            raise SizeGuardError(f"field order {q} exceeds {MAX_ORDER}")
        self.p = p
        self.k = k
        self.q = q
        if modulus is None:
            modulus = _canonical_modulus(p, k) if k > 1 else (0, 1)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise InputFormatError("modulus must be monic of degree k")
            if k > 1 and not _is_irreducible(modulus, p):
                raise InputFormatError("modulus is not irreducible")
        self.modulus = modulus
        if k > 1:
            self._build_tables()

    # -- construction internals ------------------------------------------

    def _raw_mul(self, a: int, b: int) -> int:
        prod = _poly_mul(_code_to_poly(a, self.p), _code_to_poly(b, self.p), self.p)
        return _poly_to_code(_poly_mod(prod, self.modulus, self.p), self.p)

    def _raw_pow(self, a: int, e: int) -> int:
        r, b = 1, a
        while e:
            if e & 1:
                r = self._raw_mul(r, b)
            b = self._raw_mul(b, b)
            e >>= 1
        return r

    def _build_tables(self) -> None:
        q = self.q
        factors = _prime_factors(q - 1)
        gen = 0
        for cand in range(2, q):
            if all(self._raw_pow(cand, (q - 1) // f) != 1 for f in factors):
                gen = cand
                break
        exp = [0] * (q - 1)
        log = [0] * q
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = self._raw_mul(acc, gen)
        self._exp = exp
        self._log = log

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, mult = 0, 1
        while a or b:
            out += ((a + b) % self.p) * mult
            a //= self.p
            b //= self.p
            mult *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out, mult = 0, 1
        while a:
            out += (-a % self.p) * mult
            a //= self.p
            mult *= self.p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.k == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, k={self.k}, q={self.q})"

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d: dict) -> "Field":
        try:
            return cls(int(d["p"]), int(d["k"]), d["modulus"])
        except (KeyError, TypeError) as exc:
            raise InputFormatError(f"bad field description: {exc}") from exc


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> Field:
    """Field of order p**k with the canonical (smallest) modulus."""
    return Field(p, k)


def field_from_order(q: int) -> Field:
    """Resolve an order like 16 or 17 to its unique field."""
    if q < 2:
        raise InputFormatError(f"no field of order {q}")
    for p in range(2, q + 1):
        if not _is_prime(p):
            continue
        k = 0
        v = q
        while v % p == 0:
            v //= p
            k += 1
        if v == 1 and k >= 1:
            return make_field(p, k)
        if q % p == 0:
            break
    raise InputFormatError(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


@dataclass
class Matrix:
    """Row-major matrix over a fixed field; rows are lists of element codes."""

    field: Field
    rows: list[list[int]]

    def __post_init__(self) -> None:
        width = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != width:
                raise InputFormatError("ragged matrix rows")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def copy_rows(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def _eliminate(field: Field, rows: list[list[int]]) -> list[list[int]]:
    """In-place forward elimination; returns the pivot rows found."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [field.sub(v, field.mul(f, w)) for v, w in zip(rows[i], rows[r])]
        pivots.append(rows[r])
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(mat: Matrix) -> int:
    """Rank over the matrix's own field."""
    return len(_eliminate(mat.field, mat.copy_rows()))


def in_rowspan(mat: Matrix, vec: Sequence[int]) -> bool:
    """True iff vec is a linear combination of mat's rows."""
    if mat.rows and len(vec) != mat.ncols:
        raise InputFormatError("vector length does not match matrix width")
    base = _eliminate(mat.field, mat.copy_rows())
    return len(_eliminate(mat.field, [list(r) for r in base] + [list(vec)])) == len(base)


def solve_combination(mat: Matrix, vec: Sequence[int]) -> list[int] | None:
    """Coefficients y with y . mat == vec, or None when vec is outside the
    rowspan.  Solved by eliminating the transposed system."""
    field = mat.field
    nr = mat.nrows
    if nr == 0:
        return [] if all(v == 0 for v in vec) else None
    # augmented transpose: columns of mat become rows, target appended.
    aug = [[mat.rows[i][c] for i in range(nr)] + [vec[c]] for c in range(mat.ncols)]
    r = 0
    where = [-1] * nr
    for c in range(nr):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = field.inv(aug[r][c])
        aug[r] = [field.mul(inv, v) for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [field.sub(v, field.mul(f, w)) for v, w in zip(aug[i], aug[r])]
        where[c] = r
        r += 1
    for row in aug[r:]:
        if row[-1] != 0:
            return None
    for i in range(r):
        if all(v == 0 for v in aug[i][:-1]) and aug[i][-1] != 0:
            return None
    return [aug[where[c]][-1] if where[c] >= 0 else 0 for c in range(nr)]


def complete_basis(mat: Matrix, count: int) -> list[list[int]]:
    """Deterministically pick `count` vectors extending mat to higher rank.

    Unit vectors are scanned first (they always suffice), then every other
    vector in ascending code order as a fallback.
    """
    field = mat.field
    ncols = mat.ncols if mat.rows else count
    base = _eliminate(field, mat.copy_rows())
    if len(base) + count > ncols:
        raise InputFormatError("not enough dimensions left to extend the basis")
    picked: list[list[int]] = []

    def independent(v: list[int]) -> bool:
        work = [list(r) for r in base] + [list(p) for p in picked] + [list(v)]
        return len(_eliminate(field, work)) == len(base) + len(picked) + 1

    for j in range(ncols):
        if len(picked) == count:
            return picked
        unit = [0] * ncols
        unit[j] = 1
        if independent(unit):
            picked.append(unit)
    code = 0
    while len(picked) < count and code < field.q**ncols:  # pragma: no cover
        digits = []
        c = code
        for _ in range(ncols):
            digits.append(c % field.q)
            c //= field.q
        vec = list(reversed(digits))
        if independent(vec):
            picked.append(vec)
        code += 1
    if len(picked) < count:  # pragma: no cover
        raise AssertionError("basis completion failed")
    return picked


def identity_rows(ncols: int, positions: Iterable[int]) -> list[list[int]]:
    """Unit rows e_j for each 0-based position."""
    out = []
    for j in positions:
        row = [0] * ncols
        row[j] = 1
        out.append(row)
    return out
