"""Runs the ten acceptance criteria at their stated tolerances and time budgets."""
import subprocess
import sys

import pytest

from padic_stochastic import acceptance

RESULTS: dict = {}


@pytest.mark.parametrize("crit", acceptance.CRITERIA, ids=lambda c: c.__name__.removeprefix("criterion_"))
def test_criterion(crit):
    res = crit(0)
    RESULTS[res.number] = res
    print(res.line())
    assert res.passed, res.details
    assert res.elapsed < res.budget, f"took {res.elapsed:.1f}s, budget {res.budget}s"


def test_verify_all_command():
    # full suite through the command line, as a user would run it
    out = subprocess.run([sys.executable, "-m", "padic_stochastic.cli", "verify-all", "--prime", "3",
                          "--precision", "20", "--seed", "7"], capture_output=True, text=True, timeout=600)
    assert out.returncode == 0, out.stderr
    assert '"failed": []' in out.stdout
    assert out.stderr.count("[PASS]") == 10
