import pytest


MARKERS = {
    "unit": "Quick tests of single functions, must run in < 2 s",
    "component": "Numerical cross-checks between modules, seconds",
    "integration": "Long duration tests at acceptance scale",
}


def pytest_configure(config: pytest.Config):
    for spec, descr in MARKERS.items():
        config.addinivalue_line("markers", f"{spec}: {descr}")
