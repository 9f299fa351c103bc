import pytest

from maxlot import AlternativeSet, PreferenceProfile


@pytest.fixture
def majority3():
    """Five voters over R/G/B with a clear majority favorite B."""
    return PreferenceProfile.from_rankings(
        ["R", "G", "B"], [(["R", "G", "B"], 2), (["B", "R", "G"], 3)]
    )


@pytest.fixture
def duo():
    """Two-alternative version of the same split: 2x R>B, 3x B>R."""
    return PreferenceProfile.from_rankings(["R", "B"], [(["R", "B"], 2), (["B", "R"], 3)])


@pytest.fixture
def cyclic():
    """Three voters whose rankings cycle; no pairwise winner exists."""
    return PreferenceProfile.from_rankings(
        ["R", "G", "B"],
        [(["R", "B", "G"], 1), (["G", "R", "B"], 1), (["B", "G", "R"], 1)],
    )


@pytest.fixture
def rgb():
    return AlternativeSet(["R", "G", "B"])
