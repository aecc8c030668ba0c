import pathlib

import pytest

from quasitrees.groups import Presentation

REPO = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def f2() -> Presentation:
    return Presentation.free(("a", "b"))


@pytest.fixture(scope="session")
def genus2() -> Presentation:
    return Presentation.from_file(REPO / "presentations" / "genus2.txt")
