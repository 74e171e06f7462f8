"""Exact arithmetic in truncated Witt rings W_n(F_{p^a}).

W_n(F_{p^a}) is realized as the Galois ring (Z/p^n)[t]/(f) for a monic
degree-a integer polynomial f that is irreducible mod p.  Elements are the
coordinate vectors of their unique degree-<a polynomial representative with
coefficients in [0, p^n); equality is coordinate-wise.  The classical Witt
coordinates (via ghost components) are kept as an independent cross-check
layer for a = 1.

Conventions
-----------
* modulus coefficients are stored low-to-high and reduced mod p^n,
* the Frobenius sigma is the unique ring automorphism lifting x -> x^p,
* the divided-power exp/log are defined on (p) and 1 + (p) for p >= 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DomainError,
    IncompatibleRingsError,
    MalformedInputError,
    UnsupportedCharacteristicError,
)

__all__ = [
    "RingParams",
    "WittElem",
    "WittCoords",
    "teichmuller",
    "teichmuller_digits",
    "frobenius",
    "frobenius_inverse",
    "dp_exp",
    "dp_log",
    "with_precision",
    "lift_elem",
    "reduce_elem",
    "default_modulus",
    "coords_add",
    "coords_mul",
    "coords_to_elem",
    "elem_to_coords",
]


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p (dense low-to-high lists), used for the
# residue field F_{p^a} = F_p[t]/(f mod p)


def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod(f: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of f by monic-up-to-unit g over F_p."""
    f = [c % p for c in f]
    _ptrim(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], -1, p)
    while len(f) - 1 >= dg and f:
        c = (f[-1] * inv_lead) % p
        shift = len(f) - 1 - dg
        for i, gc in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gc) % p
        _ptrim(f)
    return f

def _pmulmod(f: list[int], g: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _pmod(out, mod, p)


def _ppowmod(f: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(list(f), mod, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        e >>= 1
    return result


def _pgcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = [c % p for c in f], [c % p for c in g]
    _ptrim(f)
    _ptrim(g)
    while g:
        f, g = g, _pmod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [(c * inv) % p for c in f]
    return f


def _pinvmod(f: list[int], mod: list[int], p: int) -> list[int]:
    """Inverse of f in F_p[t]/(mod); mod need not be irreducible as long as
    gcd(f, mod) = 1."""
    # extended Euclid
    r0, r1 = [c % p for c in mod], _pmod(list(f), mod, p)
    s0, s1 = [0], [1]
    while _ptrim(list(r1)):
        # divide r0 by r1
        q = []
        rem = list(r0)
        dg = len(r1) - 1
        inv_lead = pow(r1[-1], -1, p)
        q = [0] * max(len(rem) - dg, 1)
        while len(rem) - 1 >= dg and rem:
            c = (rem[-1] * inv_lead) % p
            shift = len(rem) - 1 - dg
            q[shift] = c
            for i, gc in enumerate(r1):
                rem[shift + i] = (rem[shift + i] - c * gc) % p
            _ptrim(rem)
        r0, r1 = r1, rem
        # s = s0 - q s1
        prod = [0] * (len(q) + len(s1) - 1) if q and s1 else []
        for i, a in enumerate(q):
            if a:
                for j, b in enumerate(s1):
                    prod[i + j] = (prod[i + j] + a * b) % p
        length = max(len(s0), len(prod))
        s = [((s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)) % p for i in range(length)]
        s0, s1 = s1, _ptrim(s)
    if len(r0) != 1:
        raise DomainError("element is not invertible in the residue field")
    c = pow(r0[0], -1, p)
    return _pmod([(x * c) % p for x in s0], mod, p)


def _irreducible_mod_p(modulus: Sequence[int], p: int, a: int) -> bool:
    f = [c % p for c in modulus]
    if len(_ptrim(list(f))) != a + 1:
        return False
    # x^{p^a} == x mod f, and gcd(x^{p^{a/q}} - x, f) = 1 for primes q | a
    x = [0, 1]
    xq = _ppowmod(x, p**a, f, p)
    sub = _ptrim([(xq[i] if i < len(xq) else 0) - (x[i] if i < len(x) else 0) for i in range(max(len(xq), 2))])
    if _pmod([c % p for c in sub], f, p):
        return False
    d = a
    q = 2
    primes = set()
    while q * q <= d:
        while d % q == 0:
            primes.add(q)
            d //= q
        q += 1
    if d > 1:
        primes.add(d)
    for q in primes:
        xq = _ppowmod(x, p ** (a // q), f, p)
        sub = [(xq[i] if i < len(xq) else 0) - (x[i] if i < len(x) else 0) for i in range(max(len(xq), 2))]
        g = _pgcd(sub, f, p)
        if len(g) != 1:
            return False
    return True


def default_modulus(p: int, a: int) -> tuple[int, ...]:
    """Lexicographically smallest monic degree-a polynomial irreducible mod p."""
    if a == 1:
        return (0, 1)
    for tail in range(p**a):
        coeffs = []
        t = tail
        for _ in range(a):
            coeffs.append(t % p)
            t //= p
        cand = tuple(coeffs) + (1,)
        if _irreducible_mod_p(cand, p, a):
            return cand
    raise MalformedInputError("no irreducible modulus found", code="bad-modulus")


@dataclass(frozen=True)
class RingParams:
    """Parameters of W_n(F_{p^a}): characteristic p, length n, residue degree a.

    For a > 1 a monic degree-a modulus (low-to-high coefficients, reduced
    mod p^n) fixes the Galois-ring basis; for a = 1 no modulus is stored.
    """

    p: int
    n: int
    a: int = 1
    modulus: tuple[int, ...] | None = None
    pn: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise MalformedInputError(f"p = {self.p} is not prime", code="not-prime")
        if not isinstance(self.n, int) or self.n < 1:
            raise MalformedInputError(f"n = {self.n} must be a positive integer", code="bad-length")
        if not isinstance(self.a, int) or self.a < 1:
            raise MalformedInputError(f"a = {self.a} must be a positive integer", code="bad-degree")
        pn = self.p**self.n
        if self.a == 1:
            if self.modulus is not None:
                raise MalformedInputError("modulus must be omitted when a = 1", code="bad-modulus")
        else:
            if self.modulus is None:
                raise MalformedInputError("modulus required when a > 1", code="bad-modulus")
            mod = tuple(int(c) % pn for c in self.modulus)
            if len(mod) != self.a + 1 or mod[-1] != 1:
                raise MalformedInputError("modulus must be monic of degree a", code="bad-modulus")
            if not _irreducible_mod_p(mod, self.p, self.a):
                raise MalformedInputError("modulus is reducible mod p", code="reducible-modulus")
            object.__setattr__(self, "modulus", mod)
        object.__setattr__(self, "pn", pn)

    # -- element constructors ------------------------------------------------

    def elem(self, coords: Iterable[int] | int) -> "WittElem":
        if isinstance(coords, int):
            coords = [coords] + [0] * (self.a - 1)
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.a:
            raise MalformedInputError(
                f"element needs {self.a} coordinates, got {len(coords)}", code="bad-element"
            )
        return WittElem._raw(self, tuple(c % self.pn for c in coords))

    def zero(self) -> "WittElem":
        return WittElem._raw(self, (0,) * self.a)

    def one(self) -> "WittElem":
        return WittElem._raw(self, (1,) + (0,) * (self.a - 1))

    def from_int(self, c: int) -> "WittElem":
        return WittElem._raw(self, (c % self.pn,) + (0,) * (self.a - 1))

    def residue_modulus(self) -> list[int]:
        if self.a == 1:
            return [0, 1]
        return [c % self.p for c in self.modulus]  # type: ignore[union-attr]


def with_precision(params: RingParams, n: int) -> RingParams:
    """Same residue field and modulus lift, Witt length n."""
    if n == params.n:
        return params
    if params.a == 1:
        return RingParams(params.p, n)
    mod = tuple(c % params.p**n for c in params.modulus)  # type: ignore[union-attr]
    return RingParams(params.p, n, params.a, mod)


class WittElem:
    """An element of W_n(F_{p^a}) in canonical Galois-ring coordinates."""

    __slots__ = ("params", "coords")

    def __init__(self, params: RingParams, coords: Sequence[int]):
        coords = tuple(int(c) % params.pn for c in coords)
        if len(coords) != params.a:
            raise MalformedInputError("coordinate vector has the wrong length", code="bad-element")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "coords", coords)

    @staticmethod
    def _raw(params: RingParams, coords: tuple[int, ...]) -> "WittElem":
        w = object.__new__(WittElem)
        object.__setattr__(w, "params", params)
        object.__setattr__(w, "coords", coords)
        return w

    def __setattr__(self, *args):
        raise AttributeError("WittElem is immutable")

    def __repr__(self):
        return f"WittElem({self.coords}, p={self.params.p}, n={self.params.n}, a={self.params.a})"

    def __eq__(self, other):
        return (
            isinstance(other, WittElem)
            and self.params == other.params
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.params.p, self.params.n, self.params.a, self.coords))

    def _same_ring(self, other: "WittElem"):
        if self.params != other.params:
            raise IncompatibleRingsError("operands live in different Witt rings")

    def __add__(self, other: "WittElem") -> "WittElem":
        self._same_ring(other)
        pn = self.params.pn
        return WittElem._raw(
            self.params, tuple((x + y) % pn for x, y in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "WittElem":
        pn = self.params.pn
        return WittElem._raw(self.params, tuple((-x) % pn for x in self.coords))

    def __sub__(self, other: "WittElem") -> "WittElem":
        self._same_ring(other)
        pn = self.params.pn
        return WittElem._raw(
            self.params, tuple((x - y) % pn for x, y in zip(self.coords, other.coords))
        )

    def __mul__(self, other: "WittElem") -> "WittElem":
        self._same_ring(other)
        params = self.params
        pn = params.pn
        a = params.a
        if a == 1:
            return WittElem._raw(params, ((self.coords[0] * other.coords[0]) % pn,))
        prod = [0] * (2 * a - 1)
        xs, ys = self.coords, other.coords
        for i, x in enumerate(xs):
            if x:
                for j, y in enumerate(ys):
                    prod[i + j] = (prod[i + j] + x * y) % pn
        # reduce by the monic modulus
        mod = params.modulus
        for d in range(2 * a - 2, a - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                shift = d - a
                for i in range(a):
                    prod[shift + i] = (prod[shift + i] - c * mod[i]) % pn
        return WittElem._raw(params, tuple(prod[:a]))

    def __pow__(self, e: int) -> "WittElem":
        if e < 0:
            return self.inverse() ** (-e)
        result = self.params.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_unit(self) -> bool:
        p = self.params.p
        return any(c % p for c in self.coords)

    def valuation(self) -> int:
        """p-adic valuation, capped at n (the zero element reports n)."""
        p, n = self.params.p, self.params.n
        v = n
        for c in self.coords:
            if c:
                w = 0
                while c % p == 0:
                    c //= p
                    w += 1
                v = min(v, w)
                if v == 0:
                    return 0
        return v

    def divide_exact(self, k: int) -> "WittElem":
        """Divide by p^k; all coordinates must be divisible.

        The result is canonical mod p^(n-k) but is returned in the same ring
        (upper digits are unspecified junk for internal staged computations).
        """
        pk = self.params.p**k
        out = []
        for c in self.coords:
            if c % pk:
                raise DomainError("exact division by p^k impossible")
            out.append(c // pk)
        return WittElem._raw(self.params, tuple(out))

    def inverse(self) -> "WittElem":
        params = self.params
        if not self.is_unit():
            raise DomainError("element is not a unit")
        if params.a == 1:
            return WittElem._raw(params, (pow(self.coords[0], -1, params.pn),))
        # invert in the residue field, then Hensel-lift (Newton iteration)
        p = params.p
        resmod = params.residue_modulus()
        inv0 = _pinvmod([c % p for c in self.coords], resmod, p)
        inv0 = inv0 + [0] * (params.a - len(inv0))
        y = params.elem(inv0)
        two = params.from_int(2)
        prec = 1
        while prec < params.n:
            y = y * (two - self * y)
            prec *= 2
        return y

    def residue(self) -> tuple[int, ...]:
        p = self.params.p
        return tuple(c % p for c in self.coords)

    def frobenius(self) -> "WittElem":
        return frobenius(self)

    def frobenius_inverse(self) -> "WittElem":
        return frobenius_inverse(self)


def lift_elem(x: WittElem, big: RingParams) -> WittElem:
    """Canonical lift: reinterpret the stored coordinates at higher precision."""
    return WittElem._raw(big, x.coords)


def balanced_lift_elem(x: WittElem, big: RingParams) -> WittElem:
    """Lift choosing the representative of smallest absolute value per
    coordinate, so small-integer matrices lift to themselves and their exact
    integer identities survive the precision raise."""
    pn = x.params.pn
    half = pn // 2
    return WittElem._raw(big, tuple((c if c <= half else c - pn) % big.pn for c in x.coords))


def reduce_elem(x: WittElem, small: RingParams) -> WittElem:
    pn = small.pn
    return WittElem._raw(small, tuple(c % pn for c in x.coords))


def teichmuller(params: RingParams, c) -> WittElem:
    """Teichmuller lift of a residue-field element.

    ``c`` may be a WittElem (taken mod p), an integer, or a coordinate
    sequence mod p.  The lift is the unique root of x^(p^a) = x reducing
    to c, obtained by Hensel iteration x <- x^(p^a).
    """
    if isinstance(c, WittElem):
        res = c.residue()
    elif isinstance(c, int):
        res = (c % params.p,) + (0,) * (params.a - 1)
    else:
        res = tuple(int(v) % params.p for v in c)
        if len(res) != params.a:
            raise MalformedInputError("residue element has the wrong length", code="bad-element")
    x = params.elem(res)
    q = params.p**params.a
    for _ in range(params.n):
        nxt = x**q
        if nxt == x:
            break
        x = nxt
    return x


def teichmuller_digits(x: WittElem) -> list[tuple[int, ...]]:
    """Digits c_i of the expansion x = sum p^i tau(c_i), as residue tuples."""
    params = x.params
    digits: list[tuple[int, ...]] = []
    cur = x
    cur_params = params
    for i in range(params.n):
        c = cur.residue()
        digits.append(c)
        if i == params.n - 1:
            break
        t = teichmuller(cur_params, c)
        y = cur - t
        cur_params = with_precision(cur_params, cur_params.n - 1)
        cur = WittElem._raw(cur_params, tuple((v // params.p) % cur_params.pn for v in y.coords))
    return digits


def _residue_pow_p(params: RingParams, res: tuple[int, ...]) -> tuple[int, ...]:
    p = params.p
    if params.a == 1:
        return (res[0] % p,)
    out = _ppowmod(list(res), p, params.residue_modulus(), p)
    return tuple(out + [0] * (params.a - len(out)))[: params.a]


def frobenius(x: WittElem) -> WittElem:
    """The ring automorphism sigma lifting c -> c^p; identity for a = 1."""
    params = x.params
    if params.a == 1:
        return x
    digits = teichmuller_digits(x)
    acc = params.zero()
    ppow = 1
    for c in digits:
        acc = acc + params.from_int(ppow) * teichmuller(params, _residue_pow_p(params, c))
        ppow *= params.p
    return acc


def frobenius_inverse(x: WittElem) -> WittElem:
    """sigma^(-1) = sigma^(a-1), since sigma has order a."""
    for _ in range(x.params.a - 1):
        x = frobenius(x)
    return x


# ---------------------------------------------------------------------------
# divided-power exponential and logarithm on the ideal (p), p >= 3


def _vp_factorial(m: int, p: int) -> int:
    v = 0
    q = p
    while q <= m:
        v += m // q
        q *= p
    return v


def _vp(m: int, p: int) -> int:
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def _exp_cutoff(p: int, n: int) -> tuple[int, int]:
    """Smallest M with m - v_p(m!) >= n for all m >= M, plus the valuation buffer."""
    # m - v_p(m!) >= m (p-2)/(p-1), so anything past n(p-1)/(p-2) is safe
    bound = (n * (p - 1)) // (p - 2) + p + 2
    last_bad = 0
    for m in range(1, bound + 1):
        if m - _vp_factorial(m, p) < n:
            last_bad = m
    cutoff = last_bad + 1
    buffer = max((_vp_factorial(m, p) for m in range(cutoff)), default=0)
    return cutoff, buffer


def _log_cutoff(p: int, n: int) -> tuple[int, int]:
    bound = n + 40
    last_bad = 0
    for m in range(1, bound + 1):
        if m - _vp(m, p) < n:
            last_bad = m
    cutoff = last_bad + 1
    buffer = max((_vp(m, p) for m in range(1, cutoff)), default=0)
    return cutoff, buffer


def dp_exp(x: WittElem) -> WittElem:
    """exp(x) = sum_m x^m / m! for x in the ideal (p); requires p >= 3.

    The series is truncated at the first index past which every term
    vanishes mod p^n; each term is evaluated by exact division at raised
    precision, so no p-adic digits are lost.
    """
    params = x.params
    p, n = params.p, params.n
    if p == 2:
        raise UnsupportedCharacteristicError("divided-power exp is not defined for p = 2")
    if x.valuation() < 1:
        raise DomainError("exp requires an argument divisible by p")
    cutoff, buffer = _exp_cutoff(p, n)
    big = with_precision(params, n + buffer)
    xb = lift_elem(x, big)
    acc = big.one()
    power = big.one()
    fact = 1
    for m in range(1, cutoff):
        power = power * xb
        fact *= m
        v = _vp_factorial(m, p)
        unit = big.from_int(fact // p**v)
        acc = acc + power.divide_exact(v) * unit.inverse()
    return reduce_elem(acc, params)


def dp_log(u: WittElem) -> WittElem:
    """log(u) = sum_m (-1)^(m-1) (u-1)^m / m for u in 1 + (p); requires p >= 3.

    Inverse of dp_exp on its domain.
    """
    params = u.params
    p, n = params.p, params.n
    if p == 2:
        raise UnsupportedCharacteristicError("divided-power log is not defined for p = 2")
    y = u - params.one()
    if y.valuation() < 1:
        raise DomainError("log requires an argument congruent to 1 mod p")
    cutoff, buffer = _log_cutoff(p, n)
    big = with_precision(params, n + buffer)
    yb = lift_elem(y, big)
    acc = big.zero()
    power = big.one()
    for m in range(1, cutoff):
        power = power * yb
        v = _vp(m, p)
        term = power.divide_exact(v) * big.from_int(m // p**v).inverse()
        acc = acc + term if m % 2 == 1 else acc - term
    return reduce_elem(acc, params)


# ---------------------------------------------------------------------------
# classical Witt coordinates for a = 1 (ghost-component cross-check layer)


@dataclass(frozen=True)
class WittCoords:
    """Classical p-typical Witt coordinates over F_p (length n, digits mod p)."""

    p: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if not _is_prime(self.p):
            raise MalformedInputError(f"p = {self.p} is not prime", code="not-prime")
        object.__setattr__(self, "digits", tuple(d % self.p for d in self.digits))


def _ghost(vec: Sequence[int], p: int) -> list[int]:
    n = len(vec)
    return [sum(p**j * vec[j] ** (p ** (i - j)) for j in range(i + 1)) for i in range(n)]


def _unghost(ghost: Sequence[int], p: int) -> list[int]:
    out: list[int] = []
    for i, g in enumerate(ghost):
        acc = g - sum(p**j * out[j] ** (p ** (i - j)) for j in range(i))
        q, r = divmod(acc, p**i)
        if r:
            raise DomainError("ghost vector is not in the image of the Witt map")
        out.append(q)
    return out


def coords_add(x: WittCoords, y: WittCoords) -> WittCoords:
    """Witt-vector addition computed through integer ghost components."""
    if x.p != y.p or len(x.digits) != len(y.digits):
        raise IncompatibleRingsError("Witt coordinate vectors are incompatible")
    gx, gy = _ghost(x.digits, x.p), _ghost(y.digits, x.p)
    z = _unghost([u + v for u, v in zip(gx, gy)], x.p)
    return WittCoords(x.p, tuple(z))


def coords_mul(x: WittCoords, y: WittCoords) -> WittCoords:
    if x.p != y.p or len(x.digits) != len(y.digits):
        raise IncompatibleRingsError("Witt coordinate vectors are incompatible")
    gx, gy = _ghost(x.digits, x.p), _ghost(y.digits, x.p)
    z = _unghost([u * v for u, v in zip(gx, gy)], x.p)
    return WittCoords(x.p, tuple(z))


def coords_to_elem(wc: WittCoords, params: RingParams) -> WittElem:
    """The bijection (x_i) -> sum p^i tau(x_i) onto W_n(F_p), a = 1 only."""
    if params.a != 1 or params.p != wc.p or len(wc.digits) != params.n:
        raise IncompatibleRingsError("coordinate bijection needs a = 1 and matching (p, n)")
    acc = params.zero()
    ppow = 1
    for d in wc.digits:
        acc = acc + params.from_int(ppow) * teichmuller(params, d)
        ppow *= params.p
    return acc


def elem_to_coords(x: WittElem) -> WittCoords:
    if x.params.a != 1:
        raise IncompatibleRingsError("classical coordinates are kept for a = 1 only")
    return WittCoords(x.params.p, tuple(d[0] for d in teichmuller_digits(x)))
