import os
from pathlib import Path

import pytest

from opshape.geometry import FrameSpec
from opshape.io import parse_landmarks
from opshape.pipeline import register_scenes

REPO_ROOT = Path(__file__).resolve().parents[1]
SOPE_CREEK_DEFAULT = REPO_ROOT / "data" / "sope_creek" / "sope_creek.csv"
SOPE_CREEK_HINT = (
    "stone-photo landmark fixture not present; transcribe it per "
    "data/sope_creek/README.md or point OPSHAPE_SOPE_CREEK at the csv"
)


def sope_creek_path() -> Path:
    env = os.environ.get("OPSHAPE_SOPE_CREEK")
    if env:
        return Path(env)
    return SOPE_CREEK_DEFAULT


@pytest.fixture(scope="session")
def sope_creek_scenes():
    path = sope_creek_path()
    if not path.is_file():
        pytest.skip(SOPE_CREEK_HINT)
    return parse_landmarks(path)


@pytest.fixture(scope="session")
def sope_creek_sample(sope_creek_scenes):
    spec = FrameSpec(frame_labels=(1, 2, 4, 3), remaining_labels=(5,))
    sample, _, _ = register_scenes(sope_creek_scenes, spec)
    return sample
