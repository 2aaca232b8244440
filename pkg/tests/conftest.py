import pytest

from ukta.data import butterfly_correct, butterfly_mistagged


@pytest.fixture
def fixture_correct():
    return butterfly_correct()


@pytest.fixture
def fixture_mistagged():
    return butterfly_mistagged()
