from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CheckStatus(str, Enum):
    """Outcome of a single verification check"""

    passed = "passed"
    failed = "failed"
    skipped = "skipped"


class Verdict(str, Enum):
    """Overall outcome of a verification run"""

    pass_ = "pass"
    fail = "fail"


# ==================== Report Schemas ====================


class CheckRecord(BaseModel):
    """One row of a verification report"""

    id: str
    claim: str
    reference: str
    status: CheckStatus
    witness: Dict[str, Any] = Field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.passed


class VerificationReport(BaseModel):
    """Full verification run: the tuple, every check and the verdict"""

    tool: str
    version: str
    params: Dict[str, Any]
    checks: List[CheckRecord] = []
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.pass_

    def check(self, check_id: str) -> Optional[CheckRecord]:
        return next((c for c in self.checks if c.id == check_id), None)

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def deterministic_dump(self) -> Dict[str, Any]:
        """model_dump without timing fields"""
        return self.model_dump(mode="json", exclude={"checks": {"__all__": {"elapsed_seconds"}}})

    class Config:
        json_schema_extra = {
            "example": {
                "tool": "kq8-deform",
                "version": "1.0.0",
                "params": {"a": "(t+t^2+t^3)/(1+t)", "w": "t"},
                "checks": [
                    {
                        "id": "modulus",
                        "claim": "p_t is separable and specializes to x^4 + 1",
                        "reference": "p_t = pi(x)(x+c)(x+d)",
                        "status": "passed",
                        "witness": {"modulus_at_zero": [1, 0, 0, 0, 1]},
                        "elapsed_seconds": 0.002,
                    }
                ],
                "verdict": "pass",
            }
        }
