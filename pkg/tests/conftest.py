from pathlib import Path

import pytest
from hypothesis import settings

from monounion.model import load_spec

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

CORPUS = Path(__file__).parent / "corpus"
CORPUS_FILES = sorted(CORPUS.glob("*.json"))


@pytest.fixture(scope="session")
def ex1():
    return load_spec(CORPUS / "ex1.json")


@pytest.fixture(scope="session")
def ex2():
    return load_spec(CORPUS / "ex2.json")


@pytest.fixture(scope="session")
def ex3():
    return load_spec(CORPUS / "ex3.json")


@pytest.fixture(scope="session", params=CORPUS_FILES, ids=lambda p: p.stem)
def corpus_spec(request):
    return load_spec(request.param)


@pytest.fixture(scope="session")
def ex5():
    return load_spec(CORPUS / "ex5.json")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        status, title, detail = test_acceptance.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}: {detail}")
