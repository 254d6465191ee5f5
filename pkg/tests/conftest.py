import pathlib
from dataclasses import replace

import pytest

from zetasum import catalog as catmod
from zetasum.core import PrecisionContext

REPO = pathlib.Path(__file__).resolve().parent.parent
CATALOG_PATH = REPO / "data" / "zeta_zeros.txt"


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext(30)


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext(40)


@pytest.fixture(scope="session")
def ctx50():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def ctx60():
    return PrecisionContext(60)


@pytest.fixture(scope="session")
def cat_full():
    return catmod.ingest(CATALOG_PATH)


@pytest.fixture(scope="session")
def cat100(cat_full):
    return replace(cat_full, ordinates=cat_full.ordinates[:100], _floats=())


@pytest.fixture(scope="session")
def cat60k(cat_full):
    return replace(cat_full, ordinates=cat_full.ordinates[:60000],
                   _floats=())
