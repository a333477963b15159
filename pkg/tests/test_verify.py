import pytest

from corrdyn.errors import UnknownSuite
from corrdyn.verify import SUITES, is_balanced, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    report = run_suite(name, seed=0)
    failed = [c for c in report["checks"] if not c["passed"]]
    assert report["passed"], failed
    assert report["suite"] == name and report["checks"]


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope")


def test_is_balanced():
    assert is_balanced((0, 0, 1, 0, 1))
    assert not is_balanced((0, 0, 1, 1))
