import pytest

from app.core.exceptions import AssemblyError, DivisionByZeroError
from app.services.analysis import (
    SeparabilityCertificate,
    SplittingField,
    center_of_block,
    complex_reference_vector,
    crossed_product_relations,
    decompose_blocks,
    dimension_vector,
    etale_check,
    quadratic_is_separable,
    separability_certificate,
    split_block_over_K,
    verify_separability_certificate,
)
from app.services.deformation import GroupTable, group_algebra_constants
from app.services.quotient_ring import ONE, ZERO
from tests.conftest import rf


@pytest.fixture(scope="module")
def blocks(context):
    return decompose_blocks(context)


@pytest.fixture(scope="module")
def crossed(context):
    return crossed_product_relations(context)


@pytest.fixture(scope="module")
def splitting(context, crossed):
    return split_block_over_K(context, crossed)


@pytest.fixture(scope="module")
def etale(context):
    return etale_check(context)


@pytest.fixture(scope="module")
def separability(constants):
    return separability_certificate(constants.as_constants())


@pytest.fixture(scope="module")
def K(params):
    return SplittingField(params.a, params.b)


class TestBlocks:
    """Test the central block decomposition"""

    def test_dimensions(self, blocks):
        """A e1, A e2, A e3 have dimensions 4, 2, 2"""
        assert blocks.dimensions == (4, 2, 2)

    def test_centers(self, blocks):
        """A e1 is central simple; A e2 and A e3 are commutative"""
        assert len(center_of_block(blocks.block("e1"))) == 1
        assert len(center_of_block(blocks.block("e2"))) == 2
        assert len(center_of_block(blocks.block("e3"))) == 2

    def test_center_of_e1_block_is_scalars(self, blocks):
        """The center of A e1 is spanned by e1"""
        (z,) = center_of_block(blocks.block("e1"))
        e1 = blocks.block("e1").idempotent
        coords = [c for c in z.coords if c]
        scale = coords[0] / next(c for c in e1.coords if c)
        assert z == e1.scale(scale)


class TestSeparability:
    """Test the separability idempotent solver"""

    def test_deformed_algebra_is_separable(self, constants, separability):
        """The 520-equation system is feasible and the certificate checks out"""
        assert separability.feasible
        assert separability.equations == 520
        assert verify_separability_certificate(constants.as_constants(), separability.certificate)

    def test_tampered_certificate_fails(self, constants):
        """The zero tensor is not a separability idempotent"""
        zero = SeparabilityCertificate(8, (ZERO,) * 64)
        assert not verify_separability_certificate(constants.as_constants(), zero)

    def test_group_algebra_is_not_separable(self, group):
        """GF(2)Q8 has no separability idempotent"""
        assert not separability_certificate(group_algebra_constants(group)).feasible

    def test_one_dimensional(self):
        """F itself is separable with E = 1 (x) 1"""
        outcome = separability_certificate([[[ONE]]])
        assert outcome.feasible
        assert outcome.certificate.entries == (ONE,)

    def test_split_and_inseparable_two_dimensional(self):
        """F x F is separable; GF(2)C2 = F[g]/(g+1)^2 is not"""
        product = [[[ONE, ZERO], [ZERO, ZERO]], [[ZERO, ZERO], [ZERO, ONE]]]
        outcome = separability_certificate(product, unit=[ONE, ONE])
        assert outcome.feasible
        assert verify_separability_certificate(product, outcome.certificate, unit=[ONE, ONE])
        c2 = [[[ONE, ZERO], [ZERO, ONE]], [[ZERO, ONE], [ONE, ZERO]]]
        assert not separability_certificate(c2).feasible


class TestCrossedProduct:
    """Test the description of A e1 as a crossed product"""

    def test_relations(self, crossed):
        """u^2 + au + b e1 = 0, v^2 = b e1, vu = (u + a e1) v"""
        assert crossed.holds
        assert crossed.broken() == []

    def test_factor_set(self, crossed, context, params):
        """f(1,1) = f(1,τb) = f(τb,1) = e1 and f(τb,τb) = b e1"""
        e1 = context.element(context.idempotents.e1)
        assert crossed.cocycle["f(1,1)"] == e1
        assert crossed.cocycle["f(τb,τb)"] == e1.scale(params.b)


class TestSplittingField:
    """Test K = F[s]/<pi(s)>"""

    def test_s_satisfies_pi(self, K):
        """s^2 = a s + b"""
        assert K.s * K.s == K.element(K.b, K.a)

    def test_inverse(self, K):
        """Nonzero elements are invertible"""
        for x in (K.s, K.s + K.one, K.element(rf("t"), rf("1/(1+t)"))):
            assert x * x.inverse() == K.one

    def test_norm_is_multiplicative(self, K):
        """N(xy) = N(x) N(y) and N(x) = x conj(x)"""
        x, y = K.s + K.one, K.element(rf("t"), ONE)
        assert (x * y).norm() == x.norm() * y.norm()
        assert x * x.conjugate() == K.element(x.norm())

    def test_conjugate_of_s(self, K):
        """s -> s + a"""
        assert K.s.conjugate() == K.s + K.element(K.a)

    def test_zero_has_no_inverse(self, K):
        with pytest.raises(DivisionByZeroError):
            K.zero.inverse()

    def test_companion_matrix(self, K):
        """Multiplication by s on (1, s) is [[0, b], [1, a]]"""
        assert K.companion_matrix() == [[ZERO, K.b], [ONE, K.a]]
        assert K.s.regular_matrix() == K.companion_matrix()


class TestSplitting:
    """Test the embedding of A e1 into M_2(K)"""

    def test_images(self, splitting, K):
        """e1 -> I, u -> diag(s, s+a), v -> [[0, b], [1, 0]]"""
        m = splitting.matrices
        assert m["e1"] == [[K.one, K.zero], [K.zero, K.one]]
        assert m["u"] == [[K.s, K.zero], [K.zero, K.s + K.element(K.a)]]
        assert m["v"] == [[K.zero, K.element(K.b)], [K.one, K.zero]]

    def test_multiplicative_and_independent(self, splitting):
        """The images multiply correctly and span M_2(K)"""
        assert splitting.multiplicative
        assert splitting.k_rank == 4
        assert splitting.passed


class TestEtale:
    """Test the commutative blocks A e2 and A e3"""

    def test_minimal_polynomials(self, etale, params):
        """(yb e2)^2 = za (yb e2) + c(c+a) e2, and likewise with d"""
        e2, e3 = etale.blocks
        za = params.z * params.a
        assert (e2.linear, e2.constant) == (za, params.c * (params.c + params.a))
        assert (e3.linear, e3.constant) == (za, params.d * (params.d + params.a))

    def test_separable(self, etale):
        assert etale.separable

    def test_z_zero_would_be_inseparable(self, params):
        """With za = 0 the quadratic is a square"""
        assert not quadratic_is_separable(ZERO, params.c * (params.c + params.a))
        assert quadratic_is_separable(params.z * params.a, params.c * (params.c + params.a))


class TestDimensionVector:
    """Test assembly of the geometric dimension vector"""

    def test_matches_complex_group_algebra(self, etale, splitting, separability, group):
        """[1, 1, 1, 1, 2] with 1+1+1+1+4 = 8"""
        report = dimension_vector(etale, splitting, 1, separability, group)
        assert report.vector == (1, 1, 1, 1, 2)
        assert report.matches
        assert report.sum_of_squares == 8

    def test_reference_vector(self, group):
        """CQ8 has four linear characters and one of degree 2"""
        assert complex_reference_vector(group) == (1, 1, 1, 1, 2)

    def test_reference_vector_for_abelian_group(self):
        """An abelian group has only linear characters"""
        c4 = GroupTable(("1", "g", "g^2", "g^3"), tuple(tuple((i + j) % 4 for j in range(4)) for i in range(4)))
        assert complex_reference_vector(c4) == (1, 1, 1, 1)

    def test_missing_report(self, splitting, separability, group):
        """Assembly needs every prerequisite report"""
        with pytest.raises(AssemblyError):
            dimension_vector(None, splitting, 1, separability, group)

    def test_center_too_large(self, etale, splitting, separability, group):
        """A non-central-simple e1 block cannot be assembled"""
        with pytest.raises(AssemblyError):
            dimension_vector(etale, splitting, 2, separability, group)
