import pytest

from reflexa import PromptForge, SparkCatalog, TickClock, load_template_catalog, mock_engine


@pytest.fixture(scope="session")
def forge():
    return PromptForge()


@pytest.fixture(scope="session")
def catalog():
    return load_template_catalog()


@pytest.fixture(scope="session")
def sparks():
    return SparkCatalog()


@pytest.fixture
def engine():
    """Deterministic offline engine: logical clock, fixed session ids."""
    counter = iter(range(10_000))
    return mock_engine(clock=TickClock(), id_factory=lambda: f"sess{next(counter):04d}")
