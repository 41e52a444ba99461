import logging
import time
from typing import Callable, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


class CheckLoggingMiddleware:
    """Log all verification checks with timing information"""

    def dispatch(self, check_id: str, call_next: Callable[[], T]) -> Tuple[T, float]:
        start_time = time.perf_counter()

        # Log check
        logger.info(f"RUN {check_id}")

        # Process check
        outcome = call_next()

        # Log outcome
        process_time = time.perf_counter() - start_time
        status = getattr(outcome, "status", outcome)
        logger.info(f"RUN {check_id} - {getattr(status, 'value', status)} - {process_time:.3f}s")

        return outcome, process_time
