"""The eight acceptance criteria at their stated scale and thresholds."""
import pytest

from skewgen.acceptance import CRITERIA, run_criterion

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number)
    ACCEPTANCE_LINES.append(result.line())
    print(result.line())
    assert result.passed, result.detail
