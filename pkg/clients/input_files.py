"""
JSON input documents: coil descriptions, extra substrate profiles, design constraints
"""

import json
import logging
from typing import Any, Dict, List, Optional

from config import SUBSTRATES_FILE
from models.geometry import CoilGeometry
from models.units import MA_PER_UM2, um_to_m
from services.design_search import DesignConstraints
from services.drive_power import SubstrateProfile

logger = logging.getLogger(__name__)

COIL_KEYS = (
    "shape",
    "turns",
    "outer_radius_um",
    "track_width_um",
    "track_spacing_um",
    "track_thickness_um",
)

# constraints file key -> (DesignConstraints field, given in µm)
CONSTRAINT_KEYS = {
    "min_track_width_um": ("min_track_width", True),
    "min_spacing_um": ("min_spacing", True),
    "max_thickness_um": ("max_thickness", True),
    "outer_radius_um": ("outer_radius", True),
    "turns_min": ("turns_min", False),
    "turns_max": ("turns_max", False),
}


def coil_from_dict(data: Dict[str, Any]) -> CoilGeometry:
    """
    Raises:
        ValueError: missing keys or invalid geometry (fractional turns included)
    """
    if not isinstance(data, dict):
        raise ValueError("coil document must be a JSON object")
    missing = [key for key in COIL_KEYS if key not in data]
    if missing:
        raise ValueError(f"coil document is missing keys: {', '.join(missing)}")
    return CoilGeometry.from_json_dict(data)


def substrate_from_dict(data: Dict[str, Any]) -> SubstrateProfile:
    """One profile; j_max given either in A/m² or in mA/µm²"""
    if "j_max_A_per_m2" in data:
        j_max = float(data["j_max_A_per_m2"])
    elif "j_max_mA_per_um2" in data:
        j_max = float(data["j_max_mA_per_um2"]) * MA_PER_UM2
    else:
        raise ValueError(f"substrate {data.get('name')!r} has no j_max_A_per_m2 / j_max_mA_per_um2")
    return SubstrateProfile(name=str(data.get("name", "")), j_max=j_max,
                            description=str(data.get("description", "")))


def constraints_from_dict(data: Dict[str, Any]) -> DesignConstraints:
    unknown = sorted(set(data) - set(CONSTRAINT_KEYS))
    if unknown:
        raise ValueError(f"unknown constraint keys: {', '.join(unknown)}")

    values = {}
    for key, (field, is_length) in CONSTRAINT_KEYS.items():
        if key in data:
            values[field] = um_to_m(float(data[key])) if is_length else data[key]
    return DesignConstraints(**values)


class InputFilesClient:
    """Reads the JSON documents the CLI accepts"""

    def __init__(self, substrates_file: str = SUBSTRATES_FILE, encoding: str = "utf-8"):
        self.substrates_file = substrates_file
        self.encoding = encoding

    def _read_json(self, path: str) -> Any:
        with open(path, "r", encoding=self.encoding) as f:
            return json.load(f)

    def load_coil(self, path: str) -> CoilGeometry:
        coil = coil_from_dict(self._read_json(path))
        logger.info(f"Loaded coil from {path}: {coil.describe()}")
        return coil

    def load_substrates(self, path: Optional[str] = None) -> List[SubstrateProfile]:
        """
        A single profile object or a list of them.

        Without a path the configured SUBSTRATES_FILE is read; no file at all
        means no extra profiles.
        """
        path = path or self.substrates_file
        if not path:
            return []
        data = self._read_json(path)
        entries = data if isinstance(data, list) else [data]
        profiles = [substrate_from_dict(entry) for entry in entries]
        logger.info(f"Loaded {len(profiles)} substrate profile(s) from {path}")
        return profiles

    def load_constraints(self, path: Optional[str] = None) -> DesignConstraints:
        if not path:
            return DesignConstraints()
        constraints = constraints_from_dict(self._read_json(path))
        logger.info(f"Loaded design constraints from {path}")
        return constraints
