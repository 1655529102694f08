import pytest

from kariforge import presets, tiles


@pytest.fixture(scope="session")
def kari():
    return presets.kari_map()


@pytest.fixture(scope="session")
def kari_tiles(kari):
    return tiles.pamap_tiles(kari)


@pytest.fixture(scope="session")
def psl2z():
    return presets.psl2z()


@pytest.fixture(scope="session")
def psl2z_family(psl2z):
    return tiles.family_tiles(psl2z)


@pytest.fixture(scope="session")
def thompson_t():
    return presets.thompson_t()


@pytest.fixture(scope="session")
def thompson_v():
    return presets.thompson_v()
