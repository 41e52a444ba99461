"""
The 8-dimensional deformed algebra A = F[x]/<p_t> [y; eta] / <q_t>.

Elements are alpha + beta*yb with alpha, beta in the quotient ring.
Products go through the skew polynomial ring followed by reduction
modulo the central monic q_t. The basis x^i y^j has index i + 4j.
"""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import (
    CentralityError,
    ContextMismatchError,
    FlatnessViolationError,
    InvalidParameterError,
)
from app.services.quotient_ring import (
    ONE,
    QUOTIENT_DIMENSION,
    ZERO,
    IdempotentTriple,
    QuotientElement,
    QuotientRing,
    build_ring,
    compute_idempotents,
)
from app.services.scalar import RationalFunction, Valuation, INFINITY
from app.services.skew import Automorphism, SkewPolynomial, eta_build, is_central

if TYPE_CHECKING:
    from app.schemas.params import DeformationParams

logger = logging.getLogger(__name__)

ALGEBRA_DIMENSION = 2 * QUOTIENT_DIMENSION

# Generic structure constants: constants[i][j][k] is the b_k coordinate of b_i * b_j
Constants = Sequence[Sequence[Sequence[RationalFunction]]]


# ==================== q_t ====================


def build_qt(params: "DeformationParams", ring: QuotientRing, eta: Automorphism) -> SkewPolynomial:
    """q_t = y^2 + z xb pi(xb) y + (xb^2 + a xb)"""
    z, a, b = params.z, params.a, params.b
    if not z:
        raise InvalidParameterError("z = 0 makes the e2 and e3 blocks inseparable")
    if z.valuation() < 1:
        raise InvalidParameterError(f"z = {z} must have valuation >= 1")
    x = ring.generator
    pi_x = x * x + a * x + b
    linear = x * pi_x * z
    constant = x * x + a * x
    return SkewPolynomial((constant, linear, ring.one), eta)


@dataclass(frozen=True)
class QtBlockForm:
    """q_t e_i written as y^2 + linear y + constant inside one block"""

    linear: QuotientElement
    constant: QuotientElement


def qt_decomposition(
    qt: SkewPolynomial, idempotents: IdempotentTriple
) -> Tuple[QtBlockForm, QtBlockForm, QtBlockForm]:
    """Components of q_t along e1, e2, e3"""
    forms = []
    for e in idempotents.as_tuple():
        forms.append(QtBlockForm(qt.coefficient(1) * e, qt.coefficient(0) * e))
    return tuple(forms)


def qt_at_zero(qt: SkewPolynomial) -> Tuple[Tuple[int, ...], ...]:
    """Coefficients of q_t at t = 0; expected y^2 + xb^2"""
    return qt.at_zero()


# ==================== Context ====================


@dataclass(frozen=True)
class DeformationContext:
    """Everything derived from one parameter tuple"""

    params: "DeformationParams"
    ring: QuotientRing
    eta: Automorphism
    idempotents: IdempotentTriple
    qt: SkewPolynomial

    @property
    def square_linear(self) -> QuotientElement:
        """yb^2 = square_linear * yb + square_constant"""
        return self.qt.coefficient(1)

    @property
    def square_constant(self) -> QuotientElement:
        return self.qt.coefficient(0)

    def element(self, alpha: QuotientElement, beta: Optional[QuotientElement] = None) -> "AlgebraElement":
        beta = beta if beta is not None else self.ring.zero
        return AlgebraElement(alpha.coords + beta.coords, self)

    def scalar(self, value: RationalFunction) -> "AlgebraElement":
        return self.element(self.ring.scalar(value))

    @property
    def one(self) -> "AlgebraElement":
        return self.scalar(ONE)

    @property
    def zero(self) -> "AlgebraElement":
        return self.scalar(ZERO)

    @property
    def xb(self) -> "AlgebraElement":
        return self.element(self.ring.generator)

    @property
    def yb(self) -> "AlgebraElement":
        return self.element(self.ring.zero, self.ring.one)

    def basis(self, index: int) -> "AlgebraElement":
        return AlgebraElement(
            tuple(ONE if k == index else ZERO for k in range(ALGEBRA_DIMENSION)), self
        )

    def basis_elements(self) -> List["AlgebraElement"]:
        return [self.basis(k) for k in range(ALGEBRA_DIMENSION)]


def build_context(params: "DeformationParams") -> DeformationContext:
    """Build ring, eta, idempotents and q_t, and confirm q_t is central"""
    ring = build_ring(params)
    eta = eta_build(params, ring)
    idempotents = compute_idempotents(params, ring)
    qt = build_qt(params, ring, eta)
    if not is_central(qt):
        raise CentralityError("q_t does not commute with xb and y")
    logger.debug(f"Deformation context ready, q_t = {qt}")
    return DeformationContext(params, ring, eta, idempotents, qt)


# ==================== Algebra elements ====================


@dataclass(frozen=True)
class AlgebraElement:
    """alpha + beta*yb, coordinates on x^i y^j at index i + 4j"""

    coords: Tuple[RationalFunction, ...]
    context: DeformationContext = field(compare=False, repr=False)

    def __post_init__(self):
        if len(self.coords) != ALGEBRA_DIMENSION:
            raise ValueError(f"algebra elements have exactly {ALGEBRA_DIMENSION} coordinates")

    @property
    def alpha(self) -> QuotientElement:
        return self.context.ring.element(self.coords[:QUOTIENT_DIMENSION])

    @property
    def beta(self) -> QuotientElement:
        return self.context.ring.element(self.coords[QUOTIENT_DIMENSION:])

    def _check(self, other: "AlgebraElement") -> None:
        if other.context is self.context:
            return
        if other.context.ring != self.context.ring or other.context.qt != self.context.qt:
            raise ContextMismatchError("elements of different deformed algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(tuple(u + v for u, v in zip(self.coords, other.coords)), self.context)

    __sub__ = __add__

    def scale(self, value: RationalFunction) -> "AlgebraElement":
        return AlgebraElement(tuple(u * value for u in self.coords), self.context)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return algebra_mul(self, other)

    def __bool__(self):
        return any(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_skew(self) -> SkewPolynomial:
        return SkewPolynomial((self.alpha, self.beta), self.context.eta)

    def valuations(self) -> Tuple[Valuation, ...]:
        return tuple(c.valuation() for c in self.coords)

    def min_valuation(self) -> Valuation:
        return min(self.valuations(), default=INFINITY)

    def at_zero(self) -> Tuple[int, ...]:
        return tuple(c.at_zero() for c in self.coords)

    def __str__(self):
        if self.beta.is_zero():
            return str(self.alpha)
        return f"({self.alpha}) + ({self.beta})*yb"


def algebra_mul(u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    """Skew multiplication followed by right division by q_t"""
    u._check(v)
    ctx = u.context
    product = (u.to_skew() * v.to_skew()).remainder(ctx.qt)
    return ctx.element(product.coefficient(0), product.coefficient(1))


# ==================== Structure constants ====================


@dataclass(frozen=True)
class StructureConstants:
    """products[i][j] = b_i * b_j"""

    context: DeformationContext
    products: Tuple[Tuple[AlgebraElement, ...], ...]

    def coordinate(self, i: int, j: int, k: int) -> RationalFunction:
        return self.products[i][j].coords[k]

    def as_constants(self) -> Tuple[Tuple[Tuple[RationalFunction, ...], ...], ...]:
        return tuple(tuple(p.coords for p in row) for row in self.products)

    def min_valuation(self) -> Valuation:
        return min(p.min_valuation() for row in self.products for p in row)

    def flatness_violations(self) -> List[Tuple[int, int, int]]:
        return [
            (i, j, k)
            for i, row in enumerate(self.products)
            for j, p in enumerate(row)
            for k, c in enumerate(p.coords)
            if c.valuation() < 0
        ]


def structure_constants(ctx: DeformationContext) -> StructureConstants:
    basis = ctx.basis_elements()
    products = tuple(tuple(algebra_mul(bi, bj) for bj in basis) for bi in basis)
    table = StructureConstants(ctx, products)
    violations = table.flatness_violations()
    if violations:
        i, j, k = violations[0]
        raise FlatnessViolationError(
            f"{len(violations)} structure constants leave k[[t]], first C[{i}][{j}][{k}] = "
            f"{table.coordinate(i, j, k)}"
        )
    logger.debug(f"Structure constants are flat, min valuation {table.min_valuation()}")
    return table


# ==================== Q8 ====================

# σ^4 = 1, τ^2 = σ^2, τσ = σ^3τ as string rewriting rules
_RELATIONS = (("τσ", "σσστ"), ("ττ", "σσ"), ("σσσσ", ""))


def _normal_form(word: str) -> Tuple[int, int]:
    changed = True
    while changed:
        changed = False
        for lhs, rhs in _RELATIONS:
            if lhs in word:
                word = word.replace(lhs, rhs, 1)
                changed = True
    return word.count("σ"), word.count("τ")


def _label(i: int, j: int) -> str:
    sigma = "" if i == 0 else ("σ" if i == 1 else f"σ^{i}")
    tau = "τ" if j else ""
    return (sigma + tau) or "1"


@dataclass(frozen=True)
class GroupTable:
    """Multiplication table on the normal forms σ^i τ^j, index i + 4j"""

    labels: Tuple[str, ...]
    table: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_presentation(cls) -> "GroupTable":
        forms = [(i, j) for j in range(2) for i in range(4)]
        words = ["σ" * i + "τ" * j for i, j in forms]
        table = []
        for u in words:
            row = []
            for v in words:
                i, j = _normal_form(u + v)
                row.append(i + 4 * j)
            table.append(tuple(row))
        return cls(tuple(_label(i, j) for i, j in forms), tuple(table))

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def identity(self) -> int:
        return 0

    def product(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inverse(self, g: int) -> int:
        return next(h for h in range(self.order) if self.table[g][h] == self.identity)

    def is_group(self) -> bool:
        n = range(self.order)
        if any(self.table[0][g] != g or self.table[g][0] != g for g in n):
            return False
        if any(sorted(row) != list(n) for row in self.table):
            return False
        return all(
            self.table[self.table[a][b]][c] == self.table[a][self.table[b][c]]
            for a in n
            for b in n
            for c in n
        )

    def conjugacy_classes(self) -> List[Tuple[int, ...]]:
        seen, classes = set(), []
        for g in range(self.order):
            if g in seen:
                continue
            cls = sorted({self.product(self.product(h, g), self.inverse(h)) for h in range(self.order)})
            seen.update(cls)
            classes.append(tuple(cls))
        return classes

    def commutator_subgroup(self) -> Tuple[int, ...]:
        group = {
            self.product(self.product(g, h), self.product(self.inverse(g), self.inverse(h)))
            for g in range(self.order)
            for h in range(self.order)
        }
        while True:
            closure = group | {self.product(g, h) for g in group for h in group}
            if closure == group:
                return tuple(sorted(group))
            group = closure

    def abelianization_order(self) -> int:
        return self.order // len(self.commutator_subgroup())


@dataclass(frozen=True)
class SpecializationReport:
    """Comparison of the t = 0 table against the group algebra"""

    matched: int
    total: int
    mismatches: Tuple[Tuple[int, int], ...] = ()

    @property
    def passed(self) -> bool:
        return self.matched == self.total


def specialize_table_t0(sc: StructureConstants, group: GroupTable) -> SpecializationReport:
    """b_i * b_j at t = 0 must be the single basis vector of g_i g_j"""
    mismatches = []
    n = group.order
    for i in range(n):
        for j in range(n):
            expected = tuple(1 if k == group.product(i, j) else 0 for k in range(n))
            if sc.products[i][j].at_zero() != expected:
                mismatches.append((i, j))
    return SpecializationReport(n * n - len(mismatches), n * n, tuple(mismatches))


def group_algebra_constants(group: GroupTable) -> Tuple[Tuple[Tuple[RationalFunction, ...], ...], ...]:
    """Structure constants of the group algebra GF(2)G inside F"""
    n = group.order
    return tuple(
        tuple(tuple(ONE if k == group.product(i, j) else ZERO for k in range(n)) for j in range(n))
        for i in range(n)
    )


# ==================== Psi cochains ====================


Vector = Tuple[int, ...]


@dataclass(frozen=True)
class PsiTable:
    """
    t-expansion of the structure constants: b_i * b_j = sum_n Psi_n(i, j) t^n.

    entries[(i, j)][n] is the GF(2) coefficient vector of t^n.
    """

    entries: Dict[Tuple[int, int], Tuple[Vector, ...]]
    max_order: int

    def psi(self, i: int, j: int, order: int) -> Vector:
        return self.entries[(i, j)][order]

    def with_flipped(self, i: int, j: int, order: int, slot: int) -> "PsiTable":
        """Copy with one coefficient bit flipped"""
        entries = dict(self.entries)
        series = list(entries[(i, j)])
        vector = list(series[order])
        vector[slot] ^= 1
        series[order] = tuple(vector)
        entries[(i, j)] = tuple(series)
        return PsiTable(entries, self.max_order)


def psi_extract(sc: StructureConstants, max_order: int) -> PsiTable:
    """Expand every structure constant to order max_order in t"""
    entries = {}
    n = len(sc.products)
    for i in range(n):
        for j in range(n):
            expansions = [c.expand(max_order + 1) for c in sc.products[i][j].coords]
            entries[(i, j)] = tuple(
                tuple(s.coefficient(order) for s in expansions) for order in range(max_order + 1)
            )
    return PsiTable(entries, max_order)


def _left_act(group: GroupTable, g: int, v: Vector) -> List[int]:
    out = [0] * group.order
    for h, bit in enumerate(v):
        if bit:
            out[group.product(g, h)] ^= 1
    return out


def _right_act(group: GroupTable, v: Vector, g: int) -> List[int]:
    out = [0] * group.order
    for h, bit in enumerate(v):
        if bit:
            out[group.product(h, g)] ^= 1
    return out


def cocycle_failures(psi: PsiTable, group: GroupTable, order: int = 1) -> List[Tuple[int, int, int]]:
    """
    Triples where g1 Psi(g2,g3) + Psi(g1g2,g3) + Psi(g1,g2g3) + Psi(g1,g2) g3
    is nonzero, Psi taken at the given order in t.
    """
    failures = []
    n = group.order
    for g1 in range(n):
        for g2 in range(n):
            for g3 in range(n):
                total = _left_act(group, g1, psi.psi(g2, g3, order))
                for k, bit in enumerate(psi.psi(group.product(g1, g2), g3, order)):
                    total[k] ^= bit
                for k, bit in enumerate(psi.psi(g1, group.product(g2, g3), order)):
                    total[k] ^= bit
                for k, bit in enumerate(_right_act(group, psi.psi(g1, g2, order), g3)):
                    total[k] ^= bit
                if any(total):
                    failures.append((g1, g2, g3))
    return failures


def hochschild_cocycle_check(psi: PsiTable, group: GroupTable) -> bool:
    """Psi_1 is a Hochschild 2-cocycle of GF(2)G with coefficients in itself"""
    return not cocycle_failures(psi, group, order=1)


def sigma_power_psi_vanishes(psi: PsiTable, group: GroupTable) -> bool:
    """Psi_n(σ^p, σ^q) = 0 for every order n >= 1 whenever p + q < 4"""
    return all(
        not any(psi.psi(p, q, order))
        for p in range(4)
        for q in range(4 - p)
        for order in range(1, psi.max_order + 1)
    )


# ==================== Associativity ====================


def associativity_failures(sc: StructureConstants) -> List[Tuple[int, int, int]]:
    """Basis triples where (b_i b_j) b_k != b_i (b_j b_k)"""
    basis = sc.context.basis_elements()
    n = len(basis)
    failures = []
    for i in range(n):
        for j in range(n):
            left = sc.products[i][j]
            for k in range(n):
                if algebra_mul(left, basis[k]) != algebra_mul(basis[i], sc.products[j][k]):
                    failures.append((i, j, k))
    return failures


def associativity_check(ctx: DeformationContext, sc: Optional[StructureConstants] = None) -> bool:
    sc = sc or structure_constants(ctx)
    return not associativity_failures(sc)
