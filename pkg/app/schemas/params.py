from typing import Any, List, Optional

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

from app.services.scalar import RationalFunction, parse_rational_function

RATIONAL_FIELDS = ("a", "b", "c", "d", "w", "z")


def _coerce(value: Any) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, str):
        return parse_rational_function(value)
    raise ValueError(f"expected a rational function in t, got {type(value).__name__}")


# ==================== Parameter Schemas ====================


class DeformationParams(BaseModel):
    """
    The tuple (a, b, c, d, w, z) of the deformation plus series precision.

    Values may be given as RationalFunction objects or in the text grammar
    ("1+t^2+t^3", "(t+t^2+t^3)/(1+t)"). When a or b is omitted it is derived
    from w, c, d through a = w+c+d, b = wc+wd+cd. The construction hypotheses
    are checked by services.params.validate, not here; a tuple violating them
    still loads and can be reported on.
    """

    a: RationalFunction
    b: RationalFunction
    c: RationalFunction
    d: RationalFunction
    w: RationalFunction
    z: RationalFunction
    series_precision: int = Field(16, ge=1, le=256)

    @model_validator(mode="before")
    @classmethod
    def derive_missing(cls, data):
        """Fill a and b from the coefficient system when omitted"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("a") is None or data.get("b") is None:
            missing = [k for k in ("w", "c", "d") if data.get(k) is None]
            if missing:
                raise ValueError(f"a and b can only be derived when w, c, d are given (missing {missing})")
            w, c, d = (_coerce(data[k]) for k in ("w", "c", "d"))
            if data.get("a") is None:
                data["a"] = w + c + d
            if data.get("b") is None:
                data["b"] = w * c + w * d + c * d
        return data

    @field_validator(*RATIONAL_FIELDS, mode="before")
    @classmethod
    def parse_rational(cls, v):
        """Parse the text grammar into exact rational functions"""
        return _coerce(v)

    @field_serializer(*RATIONAL_FIELDS)
    def serialize_rational(self, v: RationalFunction) -> str:
        return str(v)

    class Config:
        arbitrary_types_allowed = True
        frozen = True
        json_schema_extra = {
            "example": {
                "a": "(t+t^2+t^3)/(1+t)",
                "b": "1+t^2+t^3",
                "c": "1/(1+t)",
                "d": "1+t+t^2",
                "w": "t",
                "z": "t",
                "series_precision": 16,
            }
        }


class ValidationCheck(BaseModel):
    """One hypothesis checked by params validation"""

    name: str
    passed: bool
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    """All hypothesis checks for a parameter tuple"""

    params: DeformationParams
    checks: List[ValidationCheck] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [check for check in self.checks if not check.passed]

    class Config:
        arbitrary_types_allowed = True
