import pytest

from pairslit.wavefield import SlitGeometry, WaveParams, make_wave_vectors

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def geom():
    return SlitGeometry(wavelength=1.0, slit_separation=20.0, slit_width=20.0, screen_distance=200.0)


@pytest.fixture(scope="session")
def bose(geom):
    return WaveParams(make_wave_vectors(geom))


@pytest.fixture(scope="session")
def mb(geom):
    return WaveParams(make_wave_vectors(geom), statistics="mb")


@pytest.fixture(scope="session")
def L(bose):
    return bose.fringe_spacing


@pytest.fixture(scope="session")
def bose_env(geom, L):
    return WaveParams(make_wave_vectors(geom), envelope_sigma=2.0 * L)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
