"""
Text / CSV / JSON rendering of result tables
"""

import json
import logging
import math
from enum import Enum
from typing import Any, Dict, Optional, TextIO

import numpy as np
import pandas as pd

from config import OUTPUT_SIGNIFICANT_DIGITS

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    JSON = "json"


def round_significant(value: float, digits: int = OUTPUT_SIGNIFICANT_DIGITS) -> float:
    if not math.isfinite(value) or value == 0.0:
        return value
    return float(f"{value:.{digits}g}")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


class OutputWriter:
    """Writes DataFrames in one output format, numbers rounded to a fixed number of significant digits"""

    def __init__(self, output_format: OutputFormat = OutputFormat.TEXT,
                 digits: int = OUTPUT_SIGNIFICANT_DIGITS):
        self.output_format = OutputFormat(output_format)
        self.digits = digits

    def rounded(self, frame: pd.DataFrame) -> pd.DataFrame:
        frame = frame.copy()
        for column in frame.columns:
            if pd.api.types.is_float_dtype(frame[column]):
                frame[column] = frame[column].map(lambda v: round_significant(v, self.digits))
        return frame

    def render(self, frame: pd.DataFrame, metadata: Optional[Dict[str, Any]] = None) -> str:
        frame = self.rounded(frame)

        if self.output_format is OutputFormat.CSV:
            return frame.to_csv(index=False, float_format=f"%.{self.digits}g", lineterminator="\n")

        if self.output_format is OutputFormat.JSON:
            document = {
                "metadata": metadata or {},
                "rows": frame.to_dict(orient="records"),
            }
            return json.dumps(document, indent=2, ensure_ascii=False, default=_json_default) + "\n"

        lines = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
        lines.append(frame.to_string(index=False))
        return "\n".join(lines) + "\n"

    def write(self, frame: pd.DataFrame, stream: TextIO, metadata: Optional[Dict[str, Any]] = None) -> None:
        stream.write(self.render(frame, metadata))
        logger.debug(f"Wrote {len(frame)} rows as {self.output_format.value}")
