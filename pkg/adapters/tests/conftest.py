import numpy as np
import pytest
from PIL import Image

from imagefx import well_image


@pytest.fixture(scope="session")
def well_png(tmp_path_factory):
    path = tmp_path_factory.mktemp("images") / "well.png"
    Image.fromarray(well_image(), mode="L").save(path)
    return path


@pytest.fixture(scope="session")
def blank_png(tmp_path_factory):
    path = tmp_path_factory.mktemp("images") / "blank.png"
    Image.fromarray(np.full((32, 32), 180, dtype=np.uint8), mode="L").save(path)
    return path
