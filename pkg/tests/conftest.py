import pytest

from app.schemas.params import DeformationParams
from app.services.deformation import GroupTable, build_context, structure_constants
from app.services.params import example_params
from app.services.scalar import RationalFunction


def rf(text: str) -> RationalFunction:
    """Shorthand for parsing a rational function in tests"""
    return RationalFunction.parse(text)


@pytest.fixture(scope="session")
def params() -> DeformationParams:
    """The worked example tuple w = t, c = 1/(1+t), d = 1+t+t^2, z = t"""
    return example_params()


@pytest.fixture(scope="session")
def context(params):
    """Deformation context for the example tuple"""
    return build_context(params)


@pytest.fixture(scope="session")
def ring(context):
    return context.ring


@pytest.fixture(scope="session")
def constants(context):
    """All 64 basis products, computed once per test session"""
    return structure_constants(context)


@pytest.fixture(scope="session")
def group() -> GroupTable:
    return GroupTable.from_presentation()


@pytest.fixture
def params_file(tmp_path):
    """
    Write a key=value params file and return its path

    Usage in tests:
        def test_something(params_file):
            path = params_file("w=t\\nc=1/(1+t)\\nd=1+t+t^2\\n")
    """

    def _write(content: str, name: str = "tuple.params"):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path

    return _write
