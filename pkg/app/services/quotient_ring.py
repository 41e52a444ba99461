"""
The commutative deformed algebra F[x]/<p_t(x)> over F = GF(2)(t)

Covers polynomials in x over F, the quotient by the monic quartic
p_t = pi(x)(x+c)(x+d), its three primitive idempotents, and the
separability / irreducibility tests for the modulus and for pi.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple, Union

from app.core.exceptions import (
    ContextMismatchError,
    DegenerateParametersError,
    DivisionByZeroError,
    NonMonicModulusError,
    PreconditionError,
)
from app.services import linalg
from app.services.scalar import (
    PowerSeriesApprox,
    RationalFunction,
    Valuation,
    _mul,
    rational_reconstruction,
)

if TYPE_CHECKING:
    from app.schemas.params import DeformationParams

logger = logging.getLogger(__name__)

ZERO = RationalFunction.zero()
ONE = RationalFunction.one()

QUOTIENT_DIMENSION = 4


# ==================== XPolynomial ====================


@dataclass(frozen=True)
class XPolynomial:
    """Polynomial in x with coefficients in GF(2)(t), lowest degree first"""

    coefficients: Tuple[RationalFunction, ...] = ()

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        end = len(coeffs)
        while end and not coeffs[end - 1]:
            end -= 1
        object.__setattr__(self, "coefficients", coeffs[:end])

    @classmethod
    def x(cls) -> "XPolynomial":
        return cls((ZERO, ONE))

    @classmethod
    def constant(cls, value: RationalFunction) -> "XPolynomial":
        return cls((value,))

    @classmethod
    def linear(cls, root: RationalFunction) -> "XPolynomial":
        """x + root (char 2: the factor vanishing at root)"""
        return cls((root, ONE))

    @classmethod
    def monomial(cls, degree: int, value: RationalFunction = ONE) -> "XPolynomial":
        return cls((ZERO,) * degree + (value,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> RationalFunction:
        return self.coefficients[-1] if self.coefficients else ZERO

    def coefficient(self, i: int) -> RationalFunction:
        return self.coefficients[i] if i < len(self.coefficients) else ZERO

    def is_monic(self) -> bool:
        return bool(self.coefficients) and self.leading == ONE

    def __bool__(self):
        return bool(self.coefficients)

    def __add__(self, other: "XPolynomial") -> "XPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return XPolynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __sub__ = __add__

    def __mul__(self, other: Union["XPolynomial", RationalFunction]) -> "XPolynomial":
        if isinstance(other, RationalFunction):
            return XPolynomial(tuple(c * other for c in self.coefficients))
        if not self or not other:
            return XPolynomial()
        out = [ZERO] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if not a:
                continue
            for j, b in enumerate(other.coefficients):
                if b:
                    out[i + j] = out[i + j] + a * b
        return XPolynomial(tuple(out))

    def __pow__(self, exponent: int) -> "XPolynomial":
        result = XPolynomial.constant(ONE)
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, divisor: "XPolynomial") -> Tuple["XPolynomial", "XPolynomial"]:
        if not divisor:
            raise DivisionByZeroError("division by the zero polynomial in x")
        remainder = list(self.coefficients)
        n = divisor.degree
        inv_lead = divisor.leading.inverse()
        quotient = [ZERO] * max(len(remainder) - n, 0)
        for k in range(len(remainder) - 1, n - 1, -1):
            coeff = remainder[k]
            if not coeff:
                continue
            factor = coeff * inv_lead
            quotient[k - n] = factor
            for j, d in enumerate(divisor.coefficients):
                if d:
                    remainder[k - n + j] = remainder[k - n + j] - factor * d
        return XPolynomial(tuple(quotient)), XPolynomial(tuple(remainder[:n]))

    def __mod__(self, divisor: "XPolynomial") -> "XPolynomial":
        return divmod(self, divisor)[1]

    def monic(self) -> "XPolynomial":
        if not self:
            return self
        return self * self.leading.inverse()

    def derivative(self) -> "XPolynomial":
        """Formal derivative; even-degree terms die in characteristic 2"""
        return XPolynomial(
            tuple(c if i % 2 else ZERO for i, c in enumerate(self.coefficients))[1:]
        )

    def gcd(self, other: "XPolynomial") -> "XPolynomial":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic()

    def compose(self, inner: "XPolynomial") -> "XPolynomial":
        """self(inner(x))"""
        result = XPolynomial()
        for c in reversed(self.coefficients):
            result = result * inner + XPolynomial.constant(c)
        return result

    def evaluate(self, value: RationalFunction) -> RationalFunction:
        result = ZERO
        for c in reversed(self.coefficients):
            result = result * value + c
        return result

    def at_zero(self) -> Tuple[int, ...]:
        return tuple(c.at_zero() for c in self.coefficients)

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if not c:
                continue
            power = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if c == ONE:
                terms.append(power or "1")
            elif not power:
                terms.append(f"({c})")
            else:
                terms.append(f"({c})*{power}")
        return " + ".join(terms)


# ==================== Quotient ring ====================


@dataclass(frozen=True)
class QuotientRing:
    """F[x]/<modulus> for a monic quartic modulus"""

    modulus: XPolynomial
    _reductions: Tuple[Tuple[RationalFunction, ...], ...] = field(
        default=(), compare=False, repr=False
    )

    def __post_init__(self):
        if not self.modulus.is_monic() or self.modulus.degree != QUOTIENT_DIMENSION:
            raise NonMonicModulusError(
                f"modulus must be monic of degree {QUOTIENT_DIMENSION}, got {self.modulus}"
            )
        # x^4, x^5, x^6 reduced, for multiplying two reduced elements
        reductions = []
        for k in range(QUOTIENT_DIMENSION, 2 * QUOTIENT_DIMENSION - 1):
            r = XPolynomial.monomial(k) % self.modulus
            reductions.append(tuple(r.coefficient(i) for i in range(QUOTIENT_DIMENSION)))
        object.__setattr__(self, "_reductions", tuple(reductions))

    def element(self, coords: Sequence[RationalFunction]) -> "QuotientElement":
        return QuotientElement(tuple(coords), self)

    def reduce(self, p: XPolynomial) -> "QuotientElement":
        r = p % self.modulus
        return self.element([r.coefficient(i) for i in range(QUOTIENT_DIMENSION)])

    def scalar(self, value: RationalFunction) -> "QuotientElement":
        return self.element((value, ZERO, ZERO, ZERO))

    @property
    def zero(self) -> "QuotientElement":
        return self.scalar(ZERO)

    @property
    def one(self) -> "QuotientElement":
        return self.scalar(ONE)

    @property
    def generator(self) -> "QuotientElement":
        return self.basis(1)

    def basis(self, i: int) -> "QuotientElement":
        return self.element(tuple(ONE if j == i else ZERO for j in range(QUOTIENT_DIMENSION)))

    def evaluate(self, p: XPolynomial, value: "QuotientElement") -> "QuotientElement":
        """p(value) computed inside the quotient"""
        result = self.zero
        for c in reversed(p.coefficients):
            result = result * value + c
        return result

    def _mul_coords(self, u, v) -> Tuple[RationalFunction, ...]:
        prod = [ZERO] * (2 * QUOTIENT_DIMENSION - 1)
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b:
                    prod[i + j] = prod[i + j] + a * b
        out = prod[:QUOTIENT_DIMENSION]
        for k, red in enumerate(self._reductions):
            coeff = prod[QUOTIENT_DIMENSION + k]
            if coeff:
                out = [o + coeff * r if r else o for o, r in zip(out, red)]
        return tuple(out)


@dataclass(frozen=True)
class QuotientElement:
    """Element of F[x]/<p_t> on the basis 1, x, x^2, x^3"""

    coords: Tuple[RationalFunction, ...]
    ring: QuotientRing

    def __post_init__(self):
        if len(self.coords) != QUOTIENT_DIMENSION:
            raise ValueError(f"quotient elements have exactly {QUOTIENT_DIMENSION} coordinates")

    def _check(self, other: "QuotientElement") -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise ContextMismatchError("elements of different quotient rings")

    def __add__(self, other: Union["QuotientElement", RationalFunction]) -> "QuotientElement":
        if isinstance(other, RationalFunction):
            return QuotientElement((self.coords[0] + other,) + self.coords[1:], self.ring)
        self._check(other)
        return QuotientElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.ring)

    __radd__ = __add__
    __sub__ = __add__

    def __mul__(self, other: Union["QuotientElement", RationalFunction]) -> "QuotientElement":
        if isinstance(other, RationalFunction):
            return QuotientElement(tuple(a * other for a in self.coords), self.ring)
        self._check(other)
        return QuotientElement(self.ring._mul_coords(self.coords, other.coords), self.ring)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QuotientElement":
        result = self.ring.one
        for _ in range(exponent):
            result = result * self
        return result

    def __bool__(self):
        return any(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def lift(self) -> XPolynomial:
        return XPolynomial(self.coords)

    def valuations(self) -> Tuple[Valuation, ...]:
        return tuple(c.valuation() for c in self.coords)

    def at_zero(self) -> Tuple[int, ...]:
        return tuple(c.at_zero() for c in self.coords)

    def __str__(self):
        return str(self.lift()).replace("x", "xb")


@dataclass(frozen=True)
class IdempotentTriple:
    """Primitive idempotents e1 (pi-component), e2 (x=c), e3 (x=d)"""

    e1: QuotientElement
    e2: QuotientElement
    e3: QuotientElement

    def as_tuple(self) -> Tuple[QuotientElement, QuotientElement, QuotientElement]:
        return (self.e1, self.e2, self.e3)

    def is_idempotent(self) -> bool:
        return all(e * e == e for e in self.as_tuple())

    def is_orthogonal(self) -> bool:
        es = self.as_tuple()
        return all((es[i] * es[j]).is_zero() for i in range(3) for j in range(3) if i != j)

    def is_complete(self) -> bool:
        return self.e1 + self.e2 + self.e3 == self.e1.ring.one

    def ranks(self) -> Tuple[int, int, int]:
        return tuple(multiplication_rank(e) for e in self.as_tuple())


class IrreducibilityVerdict(str, Enum):
    """Outcome of the root search for pi(x)"""

    irreducible = "irreducible"
    reducible_with_root = "reducible_with_root"
    unknown = "unknown"


@dataclass(frozen=True)
class IrreducibilityResult:
    verdict: IrreducibilityVerdict
    precision: int
    modular_roots: int
    root: Optional[RationalFunction] = None


# ==================== Operations ====================


def pi_polynomial(params: "DeformationParams") -> XPolynomial:
    """pi(x) = x^2 + a x + b"""
    return XPolynomial((params.b, params.a, ONE))


def build_modulus(params: "DeformationParams") -> XPolynomial:
    """p_t(x) = pi(x)(x+c)(x+d)"""
    return pi_polynomial(params) * XPolynomial.linear(params.c) * XPolynomial.linear(params.d)


def build_ring(params: "DeformationParams") -> QuotientRing:
    return QuotientRing(build_modulus(params))


def reduce(p: XPolynomial, modulus: XPolynomial) -> QuotientElement:
    return QuotientRing(modulus).reduce(p)


def q_mul(u: QuotientElement, v: QuotientElement) -> QuotientElement:
    return u * v


def multiplication_matrix(e: QuotientElement) -> List[List[RationalFunction]]:
    """Rows are coordinates; column j holds e * xb^j"""
    columns = [(e * e.ring.basis(j)).coords for j in range(QUOTIENT_DIMENSION)]
    return [[columns[j][i] for j in range(QUOTIENT_DIMENSION)] for i in range(QUOTIENT_DIMENSION)]


def multiplication_rank(e: QuotientElement) -> int:
    return linalg.rank(multiplication_matrix(e))


def compute_idempotents(
    params: "DeformationParams", ring: Optional[QuotientRing] = None
) -> IdempotentTriple:
    a, b, c, d, w = params.a, params.b, params.c, params.d, params.w
    if not a:
        raise DegenerateParametersError("a = 0: the idempotents divide by a")
    if c == d:
        raise DegenerateParametersError("c = d: e2 and e3 divide by a(c+d)")
    ring = ring or build_ring(params)
    x = ring.generator
    pi_x = x * x + a * x + b
    e1 = (x + w) * (x + c) * (x + d) * a.inverse()
    scale = (a * (c + d)).inverse()
    e2 = (x + d) * pi_x * (c * scale)
    e3 = (x + c) * pi_x * (d * scale)
    logger.debug(f"Idempotents built: e1={e1}")
    return IdempotentTriple(e1, e2, e3)


def separability_of_modulus(p: XPolynomial) -> bool:
    """gcd(p, p') = 1"""
    if not p:
        raise PreconditionError("separability of the zero polynomial")
    return p.gcd(p.derivative()).degree == 0


def _modular_roots(a: PowerSeriesApprox, b: PowerSeriesApprox, precision: int) -> List[int]:
    """Every u mod t^precision with u(0) = 1 and u^2 + a u + b = 0 mod t^precision"""

    def residue(u: int) -> int:
        return _mul(u, u) ^ _mul(a.bits, u) ^ b.bits

    level = [1] if not residue(1) & 1 else []
    for k in range(2, precision + 1):
        mask = (1 << k) - 1
        level = [
            cand
            for u in level
            for cand in (u, u | (1 << (k - 1)))
            if not residue(cand) & mask
        ]
        if not level:
            break
    return level


def irreducibility_check(pi: XPolynomial, precision: int = 2) -> IrreducibilityResult:
    """
    Three-valued irreducibility test for pi = x^2 + a x + b over k((t)).

    With val(a) >= 1 and b = 1 mod t every root in k((t)) is a power series
    with constant term 1, so no root mod t^N proves irreducibility. A modular
    root only counts once it lifts to an exact rational root.
    """
    if pi.degree != 2 or not pi.is_monic():
        raise PreconditionError(f"expected a monic quadratic, got {pi}")
    a, b = pi.coefficient(1), pi.coefficient(0)
    if a.valuation() < 1:
        raise PreconditionError(f"linear coefficient {a} must have valuation >= 1")
    if not b.is_deformation_unit():
        raise PreconditionError(f"constant coefficient {b} must be 1 mod t")
    if precision < 1:
        raise PreconditionError("precision must be positive")

    roots = _modular_roots(a.expand(precision), b.expand(precision), precision)
    if not roots:
        return IrreducibilityResult(IrreducibilityVerdict.irreducible, precision, 0)

    for bits in roots:
        series = PowerSeriesApprox(bits, precision)
        for num_degree in range(precision - 1, -1, -1):
            candidate = rational_reconstruction(series, num_degree, precision - 1 - num_degree)
            if candidate is not None and not pi.evaluate(candidate):
                logger.info(f"pi has the exact root {candidate}")
                return IrreducibilityResult(
                    IrreducibilityVerdict.reducible_with_root, precision, len(roots), candidate
                )
    return IrreducibilityResult(IrreducibilityVerdict.unknown, precision, len(roots))
