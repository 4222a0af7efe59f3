import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from lnsfp8 import E4M3, E5M2, OpKind, derive_carry, verify_all  # noqa: E402
from lnsfp8.exact import IEEE_MODES  # noqa: E402


@pytest.fixture(scope="session")
def verify_reports():
    """Every supported cell of both tables, verified once per session."""
    return {fmt.name: verify_all(fmt) for fmt in (E5M2, E4M3)}


@pytest.fixture(scope="session")
def derived_tables():
    """derive_carry at the row constant for every (format, op, IEEE mode)."""
    return {
        (fmt.name, op, mode): derive_carry(op, fmt, mode)
        for fmt in (E5M2, E4M3)
        for op in OpKind
        for mode in IEEE_MODES
    }


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria")


