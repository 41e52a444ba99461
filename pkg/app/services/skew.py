"""
The twisting automorphism eta of the quotient ring and the skew
polynomial ring over it, y * a = eta(a) * y.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Sequence, Tuple

from app.core.exceptions import ContextMismatchError
from app.services.quotient_ring import (
    QUOTIENT_DIMENSION,
    QuotientElement,
    QuotientRing,
    XPolynomial,
    pi_polynomial,
)

if TYPE_CHECKING:
    from app.schemas.params import DeformationParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Automorphism:
    """
    Ring endomorphism of F[x]/<p_t> fixed by the image of xb.

    images[i] caches eta(xb^i); applying eta to any element is then a
    linear combination of the cached images.
    """

    ring: QuotientRing
    image_of_generator: QuotientElement
    images: Tuple[QuotientElement, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.image_of_generator.ring != self.ring:
            raise ContextMismatchError("automorphism image lives in another ring")
        powers = [self.ring.one]
        for _ in range(1, QUOTIENT_DIMENSION):
            powers.append(powers[-1] * self.image_of_generator)
        object.__setattr__(self, "images", tuple(powers))

    @classmethod
    def from_image(cls, ring: QuotientRing, image: QuotientElement) -> "Automorphism":
        return cls(ring, image)

    @classmethod
    def identity(cls, ring: QuotientRing) -> "Automorphism":
        return cls(ring, ring.generator)

    def apply(self, v: QuotientElement) -> QuotientElement:
        result = self.ring.zero
        for coeff, image in zip(v.coords, self.images):
            if coeff:
                result = result + image * coeff
        return result

    __call__ = apply

    @cached_property
    def square_images(self) -> Tuple[QuotientElement, ...]:
        """eta(eta(xb^i))"""
        return tuple(self.apply(image) for image in self.images)

    @cached_property
    def is_involution(self) -> bool:
        return all(sq == self.ring.basis(i) for i, sq in enumerate(self.square_images))

    def apply_power(self, v: QuotientElement, k: int) -> QuotientElement:
        if self.is_involution:
            k %= 2
        for _ in range(k):
            v = self.apply(v)
        return v


# ==================== Skew polynomials ====================


@dataclass(frozen=True)
class SkewPolynomial:
    """Sum of a_i y^i with coefficients on the left of the powers of y"""

    coefficients: Tuple[QuotientElement, ...]
    twist: Automorphism

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        end = len(coeffs)
        while end and coeffs[end - 1].is_zero():
            end -= 1
        object.__setattr__(self, "coefficients", coeffs[:end])

    @classmethod
    def constant(cls, value: QuotientElement, twist: Automorphism) -> "SkewPolynomial":
        return cls((value,), twist)

    @classmethod
    def y(cls, twist: Automorphism, power: int = 1) -> "SkewPolynomial":
        ring = twist.ring
        return cls((ring.zero,) * power + (ring.one,), twist)

    @property
    def ring(self) -> QuotientRing:
        return self.twist.ring

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, i: int) -> QuotientElement:
        return self.coefficients[i] if i < len(self.coefficients) else self.ring.zero

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_monic(self) -> bool:
        return bool(self.coefficients) and self.coefficients[-1] == self.ring.one

    def _check(self, other: "SkewPolynomial") -> None:
        if other.twist is not self.twist and other.twist != self.twist:
            raise ContextMismatchError("skew polynomials over different twists")

    def __add__(self, other: "SkewPolynomial") -> "SkewPolynomial":
        self._check(other)
        n = max(len(self.coefficients), len(other.coefficients))
        return SkewPolynomial(
            tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)), self.twist
        )

    __sub__ = __add__

    def __mul__(self, other: "SkewPolynomial") -> "SkewPolynomial":
        """(a y^i)(b y^j) = a eta^i(b) y^(i+j)"""
        self._check(other)
        if self.is_zero() or other.is_zero():
            return SkewPolynomial((), self.twist)
        out = [self.ring.zero] * (len(self.coefficients) + len(other.coefficients) - 1)
        twisted = {}
        for i, a in enumerate(self.coefficients):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coefficients):
                if b.is_zero():
                    continue
                key = (i % 2 if self.twist.is_involution else i, j)
                if key not in twisted:
                    twisted[key] = self.twist.apply_power(b, i)
                out[i + j] = out[i + j] + a * twisted[key]
        return SkewPolynomial(tuple(out), self.twist)

    def scale(self, value: QuotientElement) -> "SkewPolynomial":
        """value * self"""
        return SkewPolynomial(tuple(value * c for c in self.coefficients), self.twist)

    def commutator(self, other: "SkewPolynomial") -> "SkewPolynomial":
        return self * other - other * self

    def remainder(self, modulus: "SkewPolynomial") -> "SkewPolynomial":
        """
        Remainder of degree < deg(modulus) after subtracting left multiples
        c y^k * modulus; modulus must be monic (and central for the result
        to describe the two-sided quotient).
        """
        self._check(modulus)
        if not modulus.is_monic():
            raise ValueError("remainder requires a monic modulus")
        n = modulus.degree
        current = self
        while current.degree >= n:
            top = current.coefficients[-1]
            shift = current.degree - n
            current = current - SkewPolynomial.y(self.twist, shift).scale(top) * modulus
        return current

    def at_zero(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(c.at_zero() for c in self.coefficients)

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c.is_zero():
                continue
            power = "" if i == 0 else ("y" if i == 1 else f"y^{i}")
            terms.append(f"[{c}]{power}")
        return " + ".join(terms)


# ==================== Operations ====================


def eta_build(params: "DeformationParams", ring: QuotientRing) -> Automorphism:
    """eta(x) = x pi(x) + x + a"""
    x = XPolynomial.x()
    image = x * pi_polynomial(params) + x + XPolynomial.constant(params.a)
    eta = Automorphism(ring, ring.reduce(image))
    logger.debug(f"eta(xb) = {eta.image_of_generator}")
    return eta


def eta_apply(eta: Automorphism, v: QuotientElement) -> QuotientElement:
    return eta.apply(v)


def skew_mul(f: SkewPolynomial, g: SkewPolynomial) -> SkewPolynomial:
    return f * g


def modulus_factors(params: "DeformationParams") -> Tuple[XPolynomial, XPolynomial, XPolynomial]:
    """(pi(x), x+c, x+d)"""
    return (
        pi_polynomial(params),
        XPolynomial.linear(params.c),
        XPolynomial.linear(params.d),
    )


def factor_membership(eta: Automorphism, factor: XPolynomial) -> bool:
    """eta(factor) lies in <factor>, computed in F[x] before any reduction"""
    composed = factor.compose(eta.image_of_generator.lift())
    return not composed % factor


def eta_well_defined(
    eta: Automorphism,
    modulus: XPolynomial,
    factors: Sequence[XPolynomial] = (),
) -> bool:
    """p_t(eta(xb)) = 0 in the quotient, and eta(f) in <f> for each given factor"""
    if eta.ring.evaluate(modulus, eta.image_of_generator):
        return False
    return all(factor_membership(eta, f) for f in factors)


def is_central(f: SkewPolynomial) -> bool:
    """f commutes with the generators xb and y"""
    twist = f.twist
    xb = SkewPolynomial.constant(twist.ring.generator, twist)
    y = SkewPolynomial.y(twist)
    return f.commutator(xb).is_zero() and f.commutator(y).is_zero()
