import pytest

from helpers import make_extraction_corpus


@pytest.fixture(scope="session")
def extraction_corpus():
    return make_extraction_corpus()
