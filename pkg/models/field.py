"""
Field samples and profiles shared by the analytic and Biot-Savart paths
"""

import math
from typing import Dict, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.geometry import CoilGeometry
from models.units import Current, Length, MagneticFieldH


class FieldSample(BaseModel):
    """Axial field H at axial distance d and lateral offset x from the coil center"""

    model_config = ConfigDict(frozen=True)

    d: Length = Field(ge=0, allow_inf_nan=False)
    x: Length = Field(default=0.0, allow_inf_nan=False)
    h: MagneticFieldH = Field(allow_inf_nan=False)


class FieldProfile(BaseModel):
    """
    Ordered field samples for one coil at one current.

    Samples are strictly increasing in (d, x). ``reference_h`` is the value the
    profile is normalized against (the x=0 sample for lateral profiles).
    """

    model_config = ConfigDict(frozen=True)

    samples: Tuple[FieldSample, ...]
    coil: CoilGeometry
    current: Current
    model: str
    reference_h: Optional[MagneticFieldH] = None
    notes: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_ordering(self) -> "FieldProfile":
        keys = [(sample.d, sample.x) for sample in self.samples]
        if any(later <= earlier for earlier, later in zip(keys, keys[1:])):
            raise ValueError("profile positions must be strictly increasing")
        return self

    @property
    def values(self) -> List[MagneticFieldH]:
        return [sample.h for sample in self.samples]

    def normalized(self) -> List[float]:
        if self.reference_h is None:
            raise ValueError("profile has no reference value to normalize against")
        if self.reference_h == 0.0:
            # zero drive current: the normalized shape is undefined
            return [math.nan] * len(self.samples)
        return [sample.h / self.reference_h for sample in self.samples]

    def metadata(self) -> Dict[str, object]:
        meta = {
            "model": self.model,
            "coil": self.coil.to_json_dict(),
            "current_A": self.current,
        }
        if self.reference_h is not None:
            meta["reference_H_A_per_m"] = self.reference_h
        if self.notes:
            meta["notes"] = list(self.notes)
        return meta

    def to_frame(self, include_normalized: bool = False) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "d_m": [sample.d for sample in self.samples],
                "x_m": [sample.x for sample in self.samples],
                "H_A_per_m": [sample.h for sample in self.samples],
            }
        )
        if include_normalized:
            frame["H_norm"] = self.normalized()
        return frame
