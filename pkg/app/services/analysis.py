"""
Structure of the deformed algebra over F = GF(2)(t): block decomposition,
separability certificate, the crossed-product description of the e1 block,
its splitting over K = F[s]/<pi(s)>, the etale check of the e2/e3 blocks
and the assembled dimension vector.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import AssemblyError, CentralityError, DependenceError, DivisionByZeroError
from app.services import linalg
from app.services.deformation import (
    Constants,
    DeformationContext,
    AlgebraElement,
    GroupTable,
)
from app.services.quotient_ring import ONE, ZERO, QuotientElement, XPolynomial, separability_of_modulus
from app.services.scalar import RationalFunction

logger = logging.getLogger(__name__)


# ==================== Blocks ====================


@dataclass(frozen=True)
class Block:
    """A e_i as an F-space with an F-basis taken from {b_j e_i}"""

    name: str
    idempotent: AlgebraElement
    basis: Tuple[AlgebraElement, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: Tuple[Block, ...]

    @property
    def dimensions(self) -> Tuple[int, ...]:
        return tuple(b.dimension for b in self.blocks)

    def block(self, name: str) -> Block:
        return next(b for b in self.blocks if b.name == name)


def _independent_subset(elements: Sequence[AlgebraElement]) -> Tuple[AlgebraElement, ...]:
    kept: List[AlgebraElement] = []
    for element in elements:
        if element.is_zero():
            continue
        if linalg.rank([k.coords for k in kept] + [element.coords]) > len(kept):
            kept.append(element)
    return tuple(kept)


def decompose_blocks(ctx: DeformationContext) -> BlockDecomposition:
    """Split A = A e1 + A e2 + A e3; every e_i must be central in A"""
    basis = ctx.basis_elements()
    blocks = []
    for name, e in zip(("e1", "e2", "e3"), ctx.idempotents.as_tuple()):
        idempotent = ctx.element(e)
        for b in basis:
            if b * idempotent != idempotent * b:
                raise CentralityError(f"{name} does not commute with basis element {b}")
        blocks.append(Block(name, idempotent, _independent_subset([b * idempotent for b in basis])))
    for i, left in enumerate(blocks):
        for right in blocks[i + 1:]:
            if not (left.idempotent * right.idempotent).is_zero():
                raise CentralityError(f"blocks {left.name} and {right.name} are not orthogonal")
    decomposition = BlockDecomposition(tuple(blocks))
    logger.debug(f"Block dimensions {decomposition.dimensions}")
    return decomposition


def center_of_block(block: Block) -> Tuple[AlgebraElement, ...]:
    """F-basis of the center of the block"""
    basis = block.basis
    n = len(basis)
    rows = []
    for bj in basis:
        commutators = [(bk * bj) - (bj * bk) for bk in basis]
        for m in range(len(basis[0].coords)):
            rows.append([commutators[k].coords[m] for k in range(n)])
    kernel = linalg.nullspace(rows, n, ZERO, ONE)
    ctx = block.idempotent.context
    center = []
    for vector in kernel:
        element = ctx.zero
        for coeff, bk in zip(vector, basis):
            if coeff:
                element = element + bk.scale(coeff)
        center.append(element)
    return tuple(center)


# ==================== Separability ====================


@dataclass(frozen=True)
class SeparabilityCertificate:
    """e = sum E_ij b_i (x) b_j with a e = e a and mu(e) = 1"""

    dimension: int
    entries: Tuple[RationalFunction, ...]

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.entries[i * self.dimension + j]

    def nonzero_entries(self) -> int:
        return sum(1 for e in self.entries if e)


@dataclass(frozen=True)
class SeparabilityOutcome:
    feasible: bool
    equations: int
    rank: int
    certificate: Optional[SeparabilityCertificate] = None


def _unit_vector(n: int, unit: Optional[Sequence[RationalFunction]]) -> Sequence[RationalFunction]:
    return unit if unit is not None else tuple(ONE if k == 0 else ZERO for k in range(n))


def separability_certificate(
    constants: Constants, unit: Optional[Sequence[RationalFunction]] = None
) -> SeparabilityOutcome:
    """
    Solve for E in the n^2 unknowns E_ij:

      sum_i E_ik C[a][i][m] + sum_j E_mj C[j][a][k] = 0   for all a, m, k
      sum_ij E_ij C[i][j][m] = unit[m]                     for all m

    The system has coefficients in GF(2) for a group algebra, so it is
    feasible over F exactly when it is feasible over GF(2).
    """
    n = len(constants)
    unit = _unit_vector(n, unit)
    solver = linalg.SparseEliminator(n * n, ZERO)
    for a in range(n):
        for m in range(n):
            for k in range(n):
                row: Dict[int, RationalFunction] = {}
                for i in range(n):
                    c = constants[a][i][m]
                    if c:
                        row[i * n + k] = row.get(i * n + k, ZERO) + c
                for j in range(n):
                    c = constants[j][a][k]
                    if c:
                        row[m * n + j] = row.get(m * n + j, ZERO) + c
                solver.add_row(row)
    for m in range(n):
        row = {}
        for i in range(n):
            for j in range(n):
                c = constants[i][j][m]
                if c:
                    row[i * n + j] = c
        if unit[m]:
            row[n * n] = unit[m]
        solver.add_row(row)

    solution = solver.solution()
    logger.debug(f"Separability system: {solver.rows_seen} equations, rank {solver.rank}")
    if solution is None:
        return SeparabilityOutcome(False, solver.rows_seen, solver.rank)
    return SeparabilityOutcome(
        True, solver.rows_seen, solver.rank, SeparabilityCertificate(n, tuple(solution))
    )


def verify_separability_certificate(
    constants: Constants,
    certificate: SeparabilityCertificate,
    unit: Optional[Sequence[RationalFunction]] = None,
) -> bool:
    """Recheck both conditions directly on the tensor coordinates"""
    n = len(constants)
    unit = _unit_vector(n, unit)
    for a in range(n):
        for m in range(n):
            for k in range(n):
                total = ZERO
                for i in range(n):
                    if constants[a][i][m]:
                        total = total + certificate.entry(i, k) * constants[a][i][m]
                for j in range(n):
                    if constants[j][a][k]:
                        total = total + certificate.entry(m, j) * constants[j][a][k]
                if total:
                    return False
    for m in range(n):
        total = ZERO
        for i in range(n):
            for j in range(n):
                if constants[i][j][m]:
                    total = total + certificate.entry(i, j) * constants[i][j][m]
        if total != unit[m]:
            return False
    return True


# ==================== Crossed product ====================


@dataclass(frozen=True)
class CrossedProductData:
    """
    A e1 as (K/F, <τb>, f): u = xb e1 generates K, v = yb e1 carries the
    action u -> u + a and the factor set f.
    """

    u: AlgebraElement
    v: AlgebraElement
    relations: Dict[str, bool]
    cocycle: Dict[str, AlgebraElement] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.relations.values())

    def broken(self) -> List[str]:
        return [name for name, ok in self.relations.items() if not ok]


def crossed_product_relations(ctx: DeformationContext) -> CrossedProductData:
    a, b = ctx.params.a, ctx.params.b
    e1 = ctx.element(ctx.idempotents.e1)
    u = ctx.xb * e1
    v = ctx.yb * e1
    b_e1 = e1.scale(b)
    cocycle = {
        "f(1,1)": e1,
        "f(1,τb)": e1,
        "f(τb,1)": e1,
        "f(τb,τb)": b_e1,
    }
    relations = {
        "u^2 + a u + b e1 = 0": (u * u + u.scale(a) + b_e1).is_zero(),
        "v^2 = b e1": v * v == b_e1,
        "v u = (u + a e1) v": v * u == (u + e1.scale(a)) * v,
        "e1 e1 = f(1,1)": e1 * e1 == cocycle["f(1,1)"],
        "e1 v = f(1,τb) v": e1 * v == cocycle["f(1,τb)"] * v,
        "v e1 = f(τb,1) v": v * e1 == cocycle["f(τb,1)"] * v,
        "v v = f(τb,τb)": v * v == cocycle["f(τb,τb)"],
    }
    data = CrossedProductData(u, v, relations, cocycle)
    if not data.holds:
        logger.warning(f"Crossed product relations broken: {data.broken()}")
    return data


# ==================== Splitting field K ====================


@dataclass(frozen=True)
class SplittingField:
    """K = F[s]/<s^2 + a s + b>"""

    a: RationalFunction
    b: RationalFunction

    def element(self, c0: RationalFunction, c1: RationalFunction = ZERO) -> "KElement":
        return KElement(c0, c1, self)

    @property
    def zero(self) -> "KElement":
        return self.element(ZERO)

    @property
    def one(self) -> "KElement":
        return self.element(ONE)

    @property
    def s(self) -> "KElement":
        return self.element(ZERO, ONE)

    def from_quotient(self, value: QuotientElement) -> "KElement":
        """Image of an element of F[x]/<p_t> in F[x]/<pi> = K"""
        r = value.lift() % XPolynomial((self.b, self.a, ONE))
        return self.element(r.coefficient(0), r.coefficient(1))

    def companion_matrix(self) -> List[List[RationalFunction]]:
        """Matrix of multiplication by s on the F-basis (1, s)"""
        return [[ZERO, self.b], [ONE, self.a]]


@dataclass(frozen=True)
class KElement:
    c0: RationalFunction
    c1: RationalFunction
    parent: SplittingField = field(compare=False, repr=False)

    def __add__(self, other: "KElement") -> "KElement":
        return KElement(self.c0 + other.c0, self.c1 + other.c1, self.parent)

    __sub__ = __add__

    def __mul__(self, other: "KElement") -> "KElement":
        a, b = self.parent.a, self.parent.b
        high = self.c1 * other.c1
        return KElement(
            self.c0 * other.c0 + b * high,
            self.c0 * other.c1 + self.c1 * other.c0 + a * high,
            self.parent,
        )

    def __bool__(self):
        return bool(self.c0) or bool(self.c1)

    def conjugate(self) -> "KElement":
        """Image under s -> s + a"""
        return KElement(self.c0 + self.parent.a * self.c1, self.c1, self.parent)

    def norm(self) -> RationalFunction:
        return self.c0 * self.c0 + self.parent.a * self.c0 * self.c1 + self.parent.b * self.c1 * self.c1

    def inverse(self) -> "KElement":
        n = self.norm()
        if not n:
            raise DivisionByZeroError(f"{self} is not invertible in K")
        inv = n.inverse()
        conj = self.conjugate()
        return KElement(conj.c0 * inv, conj.c1 * inv, self.parent)

    def __truediv__(self, other: "KElement") -> "KElement":
        return self * other.inverse()

    def regular_matrix(self) -> List[List[RationalFunction]]:
        """Matrix of multiplication by self on the F-basis (1, s)"""
        column0 = self
        column1 = self * self.parent.s
        return [[column0.c0, column1.c0], [column0.c1, column1.c1]]

    def __str__(self):
        if not self.c1:
            return str(self.c0)
        return f"({self.c0}) + ({self.c1})*s"


KMatrix = List[List[KElement]]


def k_matmul(left: KMatrix, right: KMatrix) -> KMatrix:
    n = len(left)
    out = []
    for i in range(n):
        row = []
        for j in range(len(right[0])):
            total = left[i][0] * right[0][j]
            for k in range(1, len(right)):
                total = total + left[i][k] * right[k][j]
            row.append(total)
        out.append(row)
    return out


@dataclass(frozen=True)
class SplittingReport:
    """Images of e1, u, v, uv in M_2(K) acting on the right K-space {e1, v}"""

    matrices: Dict[str, KMatrix]
    multiplicative: bool
    k_rank: int
    f_rank: int
    failures: Tuple[Tuple[str, str], ...] = ()

    @property
    def passed(self) -> bool:
        return self.multiplicative and self.k_rank == 4 and self.f_rank == 4


def _decompose(K: SplittingField, ctx: DeformationContext, Y: AlgebraElement) -> Tuple[KElement, KElement]:
    """Y = alpha + v beta with alpha, beta in K; Y = Y_A + Y_B yb gives beta = eta(Y_B)"""
    alpha = K.from_quotient(Y.alpha)
    beta = K.from_quotient(ctx.eta.apply(Y.beta))
    return alpha, beta


def left_multiplication_matrix(
    K: SplittingField, ctx: DeformationContext, crossed: CrossedProductData, X: AlgebraElement
) -> KMatrix:
    e1 = ctx.element(ctx.idempotents.e1)
    col0 = _decompose(K, ctx, X * e1)
    col1 = _decompose(K, ctx, X * crossed.v)
    return [[col0[0], col1[0]], [col0[1], col1[1]]]


def split_block_over_K(
    ctx: DeformationContext, crossed: CrossedProductData, K: Optional[SplittingField] = None
) -> SplittingReport:
    K = K or SplittingField(ctx.params.a, ctx.params.b)
    e1 = ctx.element(ctx.idempotents.e1)
    elements = {"e1": e1, "u": crossed.u, "v": crossed.v, "uv": crossed.u * crossed.v}
    matrices = {name: left_multiplication_matrix(K, ctx, crossed, X) for name, X in elements.items()}

    failures = []
    for left_name, X in elements.items():
        for right_name, Y in elements.items():
            expected = left_multiplication_matrix(K, ctx, crossed, X * Y)
            if expected != k_matmul(matrices[left_name], matrices[right_name]):
                failures.append((left_name, right_name))

    k_rows = [[m[0][0], m[0][1], m[1][0], m[1][1]] for m in matrices.values()]
    k_rank = linalg.rank(k_rows)
    f_rows = [[c for entry in row for c in (entry.c0, entry.c1)] for row in k_rows]
    f_rank = linalg.rank(f_rows)
    if k_rank < 4:
        raise DependenceError(f"images of e1, u, v, uv span only {k_rank} K-dimensions of M_2(K)")

    report = SplittingReport(matrices, not failures, k_rank, f_rank, tuple(failures))
    logger.debug(f"Splitting over K: multiplicative={report.multiplicative}, ranks {k_rank}/{f_rank}")
    return report


# ==================== Etale blocks ====================


@dataclass(frozen=True)
class EtaleBlock:
    """(yb e)^2 = linear (yb e) + constant e inside one block"""

    name: str
    linear: RationalFunction
    constant: RationalFunction

    @property
    def minimal_polynomial(self) -> XPolynomial:
        return XPolynomial((self.constant, self.linear, ONE))

    @property
    def separable(self) -> bool:
        return quadratic_is_separable(self.linear, self.constant)


@dataclass(frozen=True)
class EtaleReport:
    blocks: Tuple[EtaleBlock, ...]

    @property
    def separable(self) -> bool:
        return all(b.separable for b in self.blocks)


def quadratic_is_separable(linear: RationalFunction, constant: RationalFunction) -> bool:
    """gcd(m, m') = 1 for m = X^2 + linear X + constant"""
    return separability_of_modulus(XPolynomial((constant, linear, ONE)))


def etale_check(ctx: DeformationContext) -> EtaleReport:
    blocks = []
    for name, e in (("e2", ctx.idempotents.e2), ("e3", ctx.idempotents.e3)):
        idempotent = ctx.element(e)
        yb_e = ctx.yb * idempotent
        square = yb_e * yb_e
        solution = linalg.solve(
            [[p, q] for p, q in zip(yb_e.coords, idempotent.coords)], square.coords, ZERO
        )
        if solution is None:
            raise AssemblyError(f"(yb {name})^2 is not in the span of yb {name} and {name}")
        blocks.append(EtaleBlock(name, solution[0], solution[1]))
    return EtaleReport(tuple(blocks))


# ==================== Dimension vector ====================


@dataclass(frozen=True)
class DimensionVectorReport:
    vector: Tuple[int, ...]
    reference: Tuple[int, ...]
    sum_of_squares: int

    @property
    def matches(self) -> bool:
        return self.vector == self.reference


def complex_reference_vector(group: GroupTable) -> Tuple[int, ...]:
    """
    Irreducible degrees of CG for a group whose non-linear characters
    form a single class: |G/G'| ones, then the remaining degree.
    """
    linear = group.abelianization_order()
    nonlinear = len(group.conjugacy_classes()) - linear
    remainder = group.order - linear
    if nonlinear == 0:
        return (1,) * linear
    degree = math.isqrt(remainder)
    if nonlinear != 1 or degree * degree != remainder:
        raise AssemblyError("character degrees are not determined by the abelianization alone")
    return (1,) * linear + (degree,)


def dimension_vector(
    etale: Optional[EtaleReport],
    splitting: Optional[SplittingReport],
    e1_center_dimension: Optional[int],
    separability: Optional[SeparabilityOutcome],
    group: GroupTable,
) -> DimensionVectorReport:
    """
    Geometric block degrees: each etale quadratic block splits into two
    copies of the algebraic closure, the e1 block becomes M_2.
    """
    if etale is None or splitting is None or e1_center_dimension is None or separability is None:
        raise AssemblyError("dimension vector needs the etale, splitting, center and separability reports")
    structural = etale.separable and splitting.passed and e1_center_dimension == 1
    if not structural:
        raise AssemblyError("structural description of the blocks did not verify")
    if structural != separability.feasible:
        raise AssemblyError("separability certificate disagrees with the block description")
    vector = tuple([1] * (2 * len(etale.blocks)) + [2])
    return DimensionVectorReport(vector, complex_reference_vector(group), sum(d * d for d in vector))
