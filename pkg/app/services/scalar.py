"""
Exact scalars of characteristic 2

Polynomials over GF(2) in t are packed into nonnegative integers: bit i is
the coefficient of t^i, addition is XOR and multiplication is carry-less.
RationalFunction is the reduced fraction field GF(2)(t) built on top of
them, and PowerSeriesApprox is GF(2)[[t]] truncated modulo t^N.
"""

import logging
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, List, Optional, Protocol, Tuple, TypeVar, Union

from app.core.config import settings
from app.core.exceptions import (
    DivisionByZeroError,
    NegativeValuationError,
    ParseError,
)

logger = logging.getLogger(__name__)


# ==================== Bit-packed GF(2)[t] kernels ====================


def _degree(a: int) -> int:
    return a.bit_length() - 1


def _trailing_zeros(a: int) -> int:
    return (a & -a).bit_length() - 1


def _mul(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def _divmod(a: int, b: int) -> Tuple[int, int]:
    if b == 0:
        raise DivisionByZeroError("division by zero polynomial")
    m = _degree(a)
    n = _degree(b)
    if m < n:
        return 0, a
    q = 0
    for shift in range(m - n, -1, -1):
        if (a >> (shift + n)) & 1:
            a ^= b << shift
            q |= 1 << shift
    return q, a


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _divmod(a, b)[1]
    return a


def _gcdext(a: int, b: int) -> Tuple[int, int, int]:
    s, s1 = 1, 0
    t, t1 = 0, 1
    while b:
        q, r = _divmod(a, b)
        a, b = b, r
        s, s1 = s1, s ^ _mul(q, s1)
        t, t1 = t1, t ^ _mul(q, t1)
    return a, s, t


def _to_terms(a: int, x: str = "t") -> str:
    if a == 0:
        return "0"
    terms = []
    for i in range(a.bit_length()):
        if (a >> i) & 1:
            if i == 0:
                terms.append("1")
            elif i == 1:
                terms.append(x)
            else:
                terms.append(f"{x}^{i}")
    return "+".join(terms)


def _series_div(num: int, den: int, precision: int) -> int:
    """num/den mod t^precision for den with constant term 1"""
    q = 0
    for i in range(precision):
        if (num >> i) & 1:
            q |= 1 << i
            num ^= den << i
    return q


# ==================== Valuations ====================


@total_ordering
class _Infinity:
    """Valuation of zero: larger than every integer, never a number"""

    _instance: Optional["_Infinity"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __lt__(self, other):
        return False

    def __hash__(self):
        return hash("valuation-infinity")

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"


INFINITY = _Infinity()

Valuation = Union[int, _Infinity]


# ==================== Field interface ====================

F = TypeVar("F", bound="CharTwoField")


class CharTwoField(Protocol):
    """Element of a field of characteristic 2 usable by the linear algebra"""

    def __add__(self: F, other: F) -> F:
        ...

    def __mul__(self: F, other: F) -> F:
        ...

    def __truediv__(self: F, other: F) -> F:
        ...

    def inverse(self: F) -> F:
        ...

    def __bool__(self) -> bool:
        ...


# ==================== TPolynomial ====================


@dataclass(frozen=True)
class TPolynomial:
    """Polynomial in t over GF(2), bit-packed"""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("TPolynomial bits must be nonnegative")

    @property
    def degree(self) -> int:
        """Degree in t (-1 for the zero polynomial)"""
        return _degree(self.bits)

    @property
    def valuation(self) -> Valuation:
        if self.bits == 0:
            return INFINITY
        return _trailing_zeros(self.bits)

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.bits.bit_length()))

    def coefficient(self, i: int) -> int:
        return (self.bits >> i) & 1

    def __bool__(self):
        return self.bits != 0

    def __add__(self, other: "TPolynomial") -> "TPolynomial":
        return TPolynomial(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "TPolynomial") -> "TPolynomial":
        return TPolynomial(_mul(self.bits, other.bits))

    def __divmod__(self, other: "TPolynomial") -> Tuple["TPolynomial", "TPolynomial"]:
        q, r = _divmod(self.bits, other.bits)
        return TPolynomial(q), TPolynomial(r)

    def __floordiv__(self, other: "TPolynomial") -> "TPolynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "TPolynomial") -> "TPolynomial":
        return divmod(self, other)[1]

    def gcd(self, other: "TPolynomial") -> "TPolynomial":
        return TPolynomial(_gcd(self.bits, other.bits))

    def gcdext(self, other: "TPolynomial") -> Tuple["TPolynomial", "TPolynomial", "TPolynomial"]:
        """Return (g, s, u) with s*self + u*other = g = gcd(self, other)"""
        g, s, u = _gcdext(self.bits, other.bits)
        return TPolynomial(g), TPolynomial(s), TPolynomial(u)

    def __str__(self):
        return _to_terms(self.bits)


# ==================== RationalFunction ====================


class RationalFunction:
    """
    Element of GF(2)(t), always stored as a reduced fraction.

    Over GF(2) the only nonzero constant is 1, so a reduced fraction is
    already canonical: equal values have bitwise-equal representations.
    Integer arguments are bit patterns (3 means 1+t), not GF(2) scalars.
    """

    __slots__ = ("num", "den")

    def __init__(
        self,
        numerator: Union[TPolynomial, int] = 0,
        denominator: Union[TPolynomial, int] = 1,
    ):
        num = numerator.bits if isinstance(numerator, TPolynomial) else numerator
        den = denominator.bits if isinstance(denominator, TPolynomial) else denominator
        if den == 0:
            raise DivisionByZeroError("rational function with zero denominator")
        if num < 0 or den < 0:
            raise ValueError("bit patterns must be nonnegative")
        if num == 0:
            den = 1
        else:
            g = _gcd(num, den)
            if g != 1:
                num = _divmod(num, g)[0]
                den = _divmod(den, g)[0]
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def _reduced(cls, num: int, den: int) -> "RationalFunction":
        obj = object.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    # ---- constructors ----

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls._reduced(0, 1)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls._reduced(1, 1)

    @classmethod
    def t(cls, power: int = 1) -> "RationalFunction":
        if power >= 0:
            return cls._reduced(1 << power, 1)
        return cls._reduced(1, 1 << -power)

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        return parse_rational_function(text)

    @classmethod
    def scalar(cls, value: int) -> "RationalFunction":
        """GF(2) scalar embedded as a constant"""
        return cls._reduced(value % 2, 1)

    # ---- views ----

    @property
    def numerator(self) -> TPolynomial:
        return TPolynomial(self.num)

    @property
    def denominator(self) -> TPolynomial:
        return TPolynomial(self.den)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def __bool__(self):
        return self.num != 0

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # ---- arithmetic ----

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.num == 0:
            return other
        if other.num == 0:
            return self
        if self.den == other.den:
            return RationalFunction(self.num ^ other.num, self.den)
        return RationalFunction(
            _mul(self.num, other.den) ^ _mul(other.num, self.den),
            _mul(self.den, other.den),
        )

    # char 2: subtraction is addition, negation is the identity
    __sub__ = __add__

    def __neg__(self) -> "RationalFunction":
        return self

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.num == 0 or other.num == 0:
            return RationalFunction.zero()
        g1 = _gcd(self.num, other.den)
        g2 = _gcd(other.num, self.den)
        n1 = _divmod(self.num, g1)[0] if g1 != 1 else self.num
        d2 = _divmod(other.den, g1)[0] if g1 != 1 else other.den
        n2 = _divmod(other.num, g2)[0] if g2 != 1 else other.num
        d1 = _divmod(self.den, g2)[0] if g2 != 1 else self.den
        return RationalFunction._reduced(_mul(n1, n2), _mul(d1, d2))

    def inverse(self) -> "RationalFunction":
        if self.num == 0:
            raise DivisionByZeroError("inverse of zero rational function")
        return RationalFunction._reduced(self.den, self.num)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "RationalFunction":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = RationalFunction.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ---- t-adic structure ----

    def valuation(self) -> Valuation:
        if self.num == 0:
            return INFINITY
        return _trailing_zeros(self.num) - _trailing_zeros(self.den)

    def at_zero(self) -> int:
        """Specialize t = 0"""
        if self.num and not self.den & 1:
            raise NegativeValuationError(f"{self} has no value at t=0")
        return self.num & 1

    def expand(self, precision: int) -> "PowerSeriesApprox":
        if precision < 1:
            raise ValueError("precision must be positive")
        if self.num and not self.den & 1:
            raise NegativeValuationError(
                f"{self} has valuation {self.valuation()} and is not in k[[t]]"
            )
        return PowerSeriesApprox(_series_div(self.num, self.den, precision), precision)

    def is_deformation_unit(self) -> bool:
        return self.valuation() == 0 and self.at_zero() == 1

    # ---- text ----

    def __str__(self):
        num = _to_terms(self.num)
        if self.den == 1:
            return num
        if self.num & (self.num - 1):
            num = f"({num})"
        den = _to_terms(self.den)
        if self.den & (self.den - 1):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunction('{self}')"


# ==================== PowerSeriesApprox ====================


@dataclass(frozen=True)
class PowerSeriesApprox:
    """Element of GF(2)[[t]]/<t^precision>"""

    bits: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")
        object.__setattr__(self, "bits", self.bits & ((1 << self.precision) - 1))

    def coefficient(self, i: int) -> int:
        if i >= self.precision:
            raise IndexError(f"coefficient t^{i} beyond precision {self.precision}")
        return (self.bits >> i) & 1

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.precision))

    def truncate(self, precision: int) -> "PowerSeriesApprox":
        if precision > self.precision:
            raise ValueError("cannot raise the precision of a truncated series")
        return PowerSeriesApprox(self.bits, precision)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: "PowerSeriesApprox") -> "PowerSeriesApprox":
        return PowerSeriesApprox(self.bits ^ other.bits, min(self.precision, other.precision))

    __sub__ = __add__

    def __mul__(self, other: "PowerSeriesApprox") -> "PowerSeriesApprox":
        precision = min(self.precision, other.precision)
        mask = (1 << precision) - 1
        return PowerSeriesApprox(_mul(self.bits & mask, other.bits & mask), precision)

    def inverse(self) -> "PowerSeriesApprox":
        if not self.bits & 1:
            raise DivisionByZeroError("series without constant term is not invertible")
        return PowerSeriesApprox(_series_div(1, self.bits, self.precision), self.precision)

    def __str__(self):
        return f"{_to_terms(self.bits)}+O(t^{self.precision})"


def rational_reconstruction(
    series: PowerSeriesApprox, num_degree: int, den_degree: int
) -> Optional[RationalFunction]:
    """
    Find n/d with deg n <= num_degree, deg d <= den_degree, d(0) = 1 and
    n = d * series mod t^N, by the half-extended Euclidean algorithm.
    """
    if num_degree + den_degree >= series.precision:
        raise ValueError("degree budget must stay below the series precision")
    r0, r1 = 1 << series.precision, series.bits
    s0, s1 = 0, 1
    while r1 and _degree(r1) > num_degree:
        q, r = _divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ _mul(q, s1)
    if _degree(s1) > den_degree or not s1 & 1:
        return None
    return RationalFunction(r1, s1)


# ==================== Text grammar ====================

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>t)|(?P<op>[\^+*/()]))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = _TOKEN.match(stripped, pos)
        if not match:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _Parser:
    """
    quotient := sum ('/' sum)?
    sum      := product ('+' product)*
    product  := atom ('*' atom)*
    atom     := '(' quotient ')' | '0' | '1' | 't' ('^' INT)?
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, value: Optional[str] = None) -> Tuple[str, str]:
        token = self.peek()
        if token is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        if value is not None and token[1] != value:
            raise ParseError(f"expected {value!r}, found {token[1]!r} in {self.text!r}")
        self.pos += 1
        return token

    def parse(self) -> RationalFunction:
        if not self.tokens:
            raise ParseError("empty rational function")
        value = self.quotient()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return value

    def quotient(self) -> RationalFunction:
        value = self.sum()
        if self.peek() == ("op", "/"):
            self.take("/")
            divisor = self.sum()
            if not divisor:
                raise ParseError(f"division by zero in {self.text!r}")
            value = self.bounded(value / divisor)
        return value

    def sum(self) -> RationalFunction:
        value = self.product()
        while self.peek() == ("op", "+"):
            self.take("+")
            value = self.bounded(value + self.product())
        return value

    def bounded_exponent(self, digits: str) -> int:
        if len(digits) > len(str(settings.MAX_PARSE_DEGREE)) or int(digits) > settings.MAX_PARSE_DEGREE:
            raise ParseError(f"exponent {digits} exceeds {settings.MAX_PARSE_DEGREE} in {self.text!r}")
        return int(digits)

    def bounded(self, value: RationalFunction) -> RationalFunction:
        if max(value.numerator.degree, value.denominator.degree) > settings.MAX_PARSE_DEGREE:
            raise ParseError(f"degree exceeds {settings.MAX_PARSE_DEGREE} in {self.text!r}")
        return value

    def product(self) -> RationalFunction:
        value = self.atom()
        while self.peek() == ("op", "*"):
            self.take("*")
            value = self.bounded(value * self.atom())
        return value

    def atom(self) -> RationalFunction:
        kind, value = self.take()
        if kind == "op" and value == "(":
            inner = self.quotient()
            self.take(")")
            return inner
        if kind == "int":
            if value not in ("0", "1"):
                raise ParseError(f"coefficient {value!r} is not in GF(2)")
            return RationalFunction.scalar(int(value))
        if kind == "var":
            if self.peek() == ("op", "^"):
                self.take("^")
                exp_kind, exponent = self.take()
                if exp_kind != "int":
                    raise ParseError(f"exponent must be an integer in {self.text!r}")
                return RationalFunction.t(self.bounded_exponent(exponent))
            return RationalFunction.t()
        raise ParseError(f"unexpected {value!r} in {self.text!r}")


def parse_rational_function(text: str) -> RationalFunction:
    """Parse '1+t^2+t^3', '(t+t^2+t^3)/(1+t)', '1/(1+t)', ..."""
    if not isinstance(text, str):
        raise ParseError(f"expected text, got {type(text).__name__}")
    return _Parser(text).parse()


# ==================== Operations ====================


def rf_add(r1: RationalFunction, r2: RationalFunction) -> RationalFunction:
    return r1 + r2


def rf_mul(r1: RationalFunction, r2: RationalFunction) -> RationalFunction:
    return r1 * r2


def rf_inv(r: RationalFunction) -> RationalFunction:
    return r.inverse()


def rf_valuation(r: RationalFunction) -> Valuation:
    return r.valuation()


def rf_expand(r: RationalFunction, precision: int) -> PowerSeriesApprox:
    return r.expand(precision)


def rf_at_zero(r: RationalFunction) -> int:
    return r.at_zero()


def is_deformation_unit(r: RationalFunction) -> bool:
    """r = 1 mod t"""
    return r.is_deformation_unit()


def polynomials_up_to(degree: int) -> Iterator[TPolynomial]:
    """All polynomials in t of degree <= degree, in bit order"""
    for bits in range(1 << (degree + 1)):
        yield TPolynomial(bits)
