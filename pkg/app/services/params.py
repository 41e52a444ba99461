"""
Parameter tuples: the worked example, hypothesis validation, search over
small-degree tuples and the key=value params file format.
"""

import logging
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from dotenv import dotenv_values
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import ParseError, PreconditionError
from app.schemas.params import RATIONAL_FIELDS, DeformationParams, ValidationCheck, ValidationReport
from app.services.quotient_ring import (
    IrreducibilityResult,
    IrreducibilityVerdict,
    XPolynomial,
    irreducibility_check,
    pi_polynomial,
)
from app.services.scalar import RationalFunction, polynomials_up_to

logger = logging.getLogger(__name__)

ONE = RationalFunction.one()


def example_params(z: Optional[str] = None, series_precision: Optional[int] = None) -> DeformationParams:
    """w = t, c = 1/(1+t), d = 1+t+t^2"""
    return DeformationParams(
        a="(t+t^2+t^3)/(1+t)",
        b="1+t^2+t^3",
        c="1/(1+t)",
        d="1+t+t^2",
        w="t",
        z=z or settings.DEFAULT_Z,
        series_precision=series_precision or settings.SERIES_PRECISION,
    )


PRESETS = {"example": example_params}


# ==================== Validation ====================


def identity_holds(params: DeformationParams) -> bool:
    """x pi(x) + a = (x+w)(x+c)(x+d) in F[x]"""
    x = XPolynomial.x()
    lhs = x * pi_polynomial(params) + XPolynomial.constant(params.a)
    rhs = XPolynomial.linear(params.w) * XPolynomial.linear(params.c) * XPolynomial.linear(params.d)
    return lhs == rhs


def coefficient_system_holds(params: DeformationParams) -> bool:
    """a = w+c+d, b = wc+wd+cd, w+c+d = wcd"""
    a, b, c, d, w = params.a, params.b, params.c, params.d, params.w
    return a == w + c + d and b == w * c + w * d + c * d and w + c + d == w * c * d


def irreducibility_with_escalation(
    params: DeformationParams,
    precision: Optional[int] = None,
    escalation: Optional[int] = None,
) -> IrreducibilityResult:
    """Root search mod t^N, retried at the escalation precision when inconclusive"""
    precision = precision or settings.IRREDUCIBILITY_PRECISION
    escalation = escalation or settings.IRREDUCIBILITY_ESCALATION
    pi = pi_polynomial(params)
    result = irreducibility_check(pi, precision)
    if result.verdict == IrreducibilityVerdict.unknown and escalation > precision:
        logger.info(f"pi inconclusive mod t^{precision}, retrying mod t^{escalation}")
        result = irreducibility_check(pi, escalation)
    return result


def validate(params: DeformationParams) -> ValidationReport:
    """Check every hypothesis on the tuple; each failure is listed separately"""
    a, b, c, d, w, z = params.a, params.b, params.c, params.d, params.w, params.z
    checks = [
        ValidationCheck(name="a_nonzero", passed=bool(a), detail=f"a = {a}"),
        ValidationCheck(
            name="a_in_maximal_ideal", passed=a.valuation() >= 1, detail=f"val(a) = {a.valuation()}"
        ),
    ]
    for name, value in (("b", b), ("c", c), ("d", d)):
        checks.append(
            ValidationCheck(
                name=f"{name}_one_unit",
                passed=value.valuation() >= 0 and value.is_deformation_unit(),
                detail=f"{name} = {value}",
            )
        )
    checks.extend(
        [
            ValidationCheck(name="c_ne_d", passed=c != d, detail=f"c = {c}, d = {d}"),
            ValidationCheck(
                name="z_nonzero_non_unit",
                passed=bool(z) and z.valuation() >= 1,
                detail=f"z = {z}",
            ),
            ValidationCheck(
                name="w_in_maximal_ideal", passed=w.valuation() >= 1, detail=f"w = {w}"
            ),
            ValidationCheck(name="sum_equals_a", passed=a == w + c + d, detail="a = w+c+d"),
            ValidationCheck(
                name="pairwise_sum_equals_b", passed=b == w * c + w * d + c * d, detail="b = wc+wd+cd"
            ),
            ValidationCheck(name="sum_equals_product", passed=w + c + d == w * c * d, detail="w+c+d = wcd"),
            ValidationCheck(
                name="factorization_identity",
                passed=identity_holds(params),
                detail="x pi(x) + a = (x+w)(x+c)(x+d)",
            ),
        ]
    )
    try:
        result = irreducibility_with_escalation(params)
        checks.append(
            ValidationCheck(
                name="pi_irreducible",
                passed=result.verdict == IrreducibilityVerdict.irreducible,
                detail=f"{result.verdict.value} mod t^{result.precision}",
            )
        )
    except PreconditionError as e:
        checks.append(ValidationCheck(name="pi_irreducible", passed=False, detail=str(e)))

    report = ValidationReport(params=params, checks=checks)
    if not report.passed:
        logger.info(f"Params rejected: {[c.name for c in report.failures()]}")
    return report


# ==================== Search ====================


def _candidate_pairs(degree_bound: int) -> Iterator[Tuple[RationalFunction, RationalFunction]]:
    """
    (w, c) with w a nonzero polynomial vanishing at 0 and c a polynomial
    1-unit other than 1 or its reciprocal, all of degree <= degree_bound
    """
    polynomials = list(polynomials_up_to(degree_bound))
    units = [RationalFunction(p) for p in polynomials if p.bits & 1 and p.bits != 1]
    cs = units + [u.inverse() for u in units]
    for p in polynomials:
        if p.bits and not p.bits & 1:
            for c in cs:
                yield RationalFunction(p), c


def search(degree_bound: int, limit: Optional[int] = None) -> List[DeformationParams]:
    """
    Tuples passing validate, in enumeration order.

    Given w and c, the condition w+c+d = wcd is linear in d, so d is
    derived as (w+c)/(wc+1) and a, b follow from the coefficient system.
    Tuples differing only by swapping c and d are reported once.
    """
    if degree_bound < 0 or degree_bound > settings.MAX_SEARCH_DEGREE:
        raise PreconditionError(
            f"degree bound must lie in 0..{settings.MAX_SEARCH_DEGREE}, got {degree_bound}"
        )
    limit = settings.DEFAULT_SEARCH_LIMIT if limit is None else limit
    found: List[DeformationParams] = []
    seen: Set[Tuple[RationalFunction, frozenset]] = set()
    for w, c in _candidate_pairs(degree_bound):
        if len(found) >= limit:
            break
        d = (w + c) / (w * c + ONE)
        key = (w, frozenset((c, d)))
        if key in seen:
            continue
        seen.add(key)
        params = DeformationParams(w=w, c=c, d=d, z=settings.DEFAULT_Z)
        if validate(params).passed:
            found.append(params)
    logger.info(f"Search to degree {degree_bound}: {len(found)} tuples")
    return found


# ==================== Params files ====================


def load_params_file(path: Union[str, Path]) -> DeformationParams:
    """
    Read a key=value params file (a, b, c, d, w, z, precision). a and b
    may be omitted and are then derived from w, c, d.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"params file not found: {path}")
    values: Dict[str, Optional[str]] = dotenv_values(path)
    unknown = sorted(set(values) - set(RATIONAL_FIELDS) - {"precision"})
    if unknown:
        raise ParseError(f"unknown keys in {path.name}: {', '.join(unknown)}")
    data: Dict[str, object] = {k: v for k, v in values.items() if k in RATIONAL_FIELDS and v}
    data.setdefault("z", settings.DEFAULT_Z)
    if values.get("precision"):
        data["series_precision"] = values["precision"]
    try:
        return DeformationParams(**data)
    except ValidationError as e:
        raise ParseError(f"invalid params file {path.name}: {e.errors()[0]['msg']}") from e


def params_to_text(params: DeformationParams) -> str:
    """The params file form of a tuple"""
    fields = params.model_dump()
    lines = [f"{name}={fields[name]}" for name in RATIONAL_FIELDS]
    lines.append(f"precision={params.series_precision}")
    return "\n".join(lines) + "\n"
