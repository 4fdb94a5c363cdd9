"""framespot: find highlight moments in videos with exemplar-photo priors."""

__version__ = "0.1.0"

from .media import Interval
from .prior import PriorProfile
from .score import FrameEmbeddingSeries, ScoreSeries
from .select import HighlightResult

__all__ = [
    "FrameEmbeddingSeries",
    "HighlightResult",
    "Interval",
    "PriorProfile",
    "ScoreSeries",
    "__version__",
]
