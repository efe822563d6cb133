from pathlib import Path

import pytest

from attrcluster.dataset import clean, infer_kinds, load_csv
from attrcluster.encoder import encode_table
from attrcluster.pipeline import analyze

ROOT = Path(__file__).resolve().parent.parent
WEATHER_CSV = ROOT / "data" / "weather.csv"


@pytest.fixture(scope="session")
def weather_csv():
    return WEATHER_CSV


@pytest.fixture(scope="session")
def weather_raw():
    return load_csv(WEATHER_CSV)


@pytest.fixture(scope="session")
def weather_table(weather_raw):
    table, _ = clean(weather_raw, infer_kinds(weather_raw))
    return table


@pytest.fixture(scope="session")
def weather_matrix(weather_table):
    return encode_table(weather_table)


@pytest.fixture(scope="session")
def weather_fa(weather_matrix):
    return analyze(weather_matrix, 0.55)



def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
