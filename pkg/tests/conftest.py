from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from models.geometry import CoilGeometry, CoilShape
from services.drive_power import MaterialProps, resolve_substrate

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
REFERENCE_COIL_FILE = str(DATA_DIR / "reference_coil.json")
REFERENCE_SQUARE_FILE = str(DATA_DIR / "reference_coil_square.json")
CONSTRAINTS_FILE = str(DATA_DIR / "constraints.json")


def make_coil(shape="round", turns=40, outer_um=500.0, width_um=5.0, spacing_um=5.0, thickness_um=10.0):
    return CoilGeometry.from_um(shape, turns, outer_um, width_um, spacing_um, thickness_um)


@pytest.fixture
def reference_coil():
    """N=40, R_max=500 um, w=s=5 um, t=10 um"""
    return make_coil()


@pytest.fixture
def reference_square():
    return make_coil(shape="square")


@pytest.fixture
def copper():
    return MaterialProps()


@pytest.fixture
def to220():
    return resolve_substrate("silicon_to220_glued")


@st.composite
def round_coils(draw, max_turns=40):
    """Valid round coils with inner radius between 5 um and 500 um"""
    turns = draw(st.integers(min_value=1, max_value=max_turns))
    width = draw(st.floats(min_value=1.0, max_value=20.0))
    spacing = draw(st.floats(min_value=0.0, max_value=20.0))
    inner = draw(st.floats(min_value=5.0, max_value=500.0))
    outer = inner + (turns - 1) * (width + spacing) + width
    return make_coil("round", turns, outer, width, spacing, 10.0)


@st.composite
def coils(draw, max_turns=40):
    coil = draw(round_coils(max_turns))
    shape = draw(st.sampled_from(list(CoilShape)))
    return coil.model_copy(update={"shape": shape})
