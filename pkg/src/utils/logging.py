"""Set up logging, warning, etc."""

import logging
import warnings

from scipy.linalg import LinAlgWarning


class RepeatedFlagFilter(logging.Filter):
    """
    A logging filter that lets each distinct clamp/contraction flag through once.

    The graph transform emits the same flag for every backward trajectory that
    touches the grid boundary; one line per distinct message is enough.
    """

    FLAG_PREFIXES = ("clamped", "lipschitz")

    def __init__(self) -> None:
        super().__init__()
        self._seen: set[tuple[str, str]] = set()

    def filter(self, record: logging.LogRecord) -> bool:
        """Define filter logic."""
        msg = record.getMessage()
        if not msg.startswith(self.FLAG_PREFIXES):
            return True

        key = (record.name, msg)
        if key in self._seen:
            return False

        self._seen.add(key)
        return True


def set_up_logging(level: int = logging.INFO):
    """Set up Logging and Warning levels."""
    root_logger = logging.getLogger()
    filter_ = RepeatedFlagFilter()

    if not root_logger.handlers:
        logging.basicConfig(
            level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
        )

    root_logger.setLevel(level)
    for handler in root_logger.handlers:
        if not any(isinstance(f, RepeatedFlagFilter) for f in handler.filters):
            handler.addFilter(filter_)

    warnings.filterwarnings("ignore", category=ResourceWarning)
    warnings.filterwarnings("ignore", category=LinAlgWarning)
