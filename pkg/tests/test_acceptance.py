"""Acceptance criteria 1-12, one test each, at the stated tolerances."""

import pytest

from cavityqc import acceptance, cli

from .conftest import ACCEPTANCE_LINES


def _report(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, line


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda c: f"criterion_{acceptance.CHECKS.index(c) + 1:02d}")
def test_criterion(check):
    _report(check(0))


def test_criterion_12_selftest_is_byte_identical(tmp_path):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [cli.run(["selftest", "--seed", "7", "--format", "json", "--out", str(p)]) for p in outs]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    ok = codes == [0, 0] and same
    _report(acceptance.CheckResult(12, "selftest determinism", ok,
                                   f"exit codes {codes}, byte-identical={same}"))
