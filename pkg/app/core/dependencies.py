from functools import lru_cache
from typing import Optional

from pydantic import ValidationError

from app.core.exceptions import DeformationError, bad_input_exception
from app.middleware.logging import CheckLoggingMiddleware
from app.schemas.params import DeformationParams
from app.services.params import PRESETS, load_params_file


@lru_cache()
def get_check_middleware() -> CheckLoggingMiddleware:
    """Check timing middleware singleton"""
    return CheckLoggingMiddleware()


def resolve_params(
    preset: Optional[str],
    params_file: Optional[str],
    precision: Optional[int],
    z: Optional[str],
) -> DeformationParams:
    """
    Build the parameter tuple from the command-line options.
    Input problems surface as exit code 2.
    """
    if preset and params_file:
        raise bad_input_exception("use either --preset or --params-file, not both")
    try:
        if params_file:
            params = load_params_file(params_file)
        else:
            params = PRESETS[preset or "example"]()
        updates = {}
        if precision is not None:
            updates["series_precision"] = precision
        if z is not None:
            updates["z"] = z
        if updates:
            params = DeformationParams(**{**params.model_dump(), **updates})
        return params
    except (DeformationError, ValidationError) as e:
        raise bad_input_exception(str(e))
