# raagtool/validator.py

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field


class Check(BaseModel):
    """One self-check row: `name` holds iff the relation between lhs and rhs holds."""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    name: str
    passed: bool = Field(alias="pass")
    lhs: float
    rhs: float


def check_equal(name: str, lhs: float, rhs: float, tol: float = 0.0) -> Check:
    return Check(name=name, passed=bool(abs(lhs - rhs) <= tol), lhs=float(lhs), rhs=float(rhs))


def check_leq(name: str, lhs: float, rhs: float, tol: float = 0.0) -> Check:
    return Check(name=name, passed=bool(lhs <= rhs + tol), lhs=float(lhs), rhs=float(rhs))


def check_geq(name: str, lhs: float, rhs: float, tol: float = 0.0) -> Check:
    return Check(name=name, passed=bool(lhs + tol >= rhs), lhs=float(lhs), rhs=float(rhs))


def summarize_checks(checks: List[Check]) -> Tuple[str, int, List[str]]:
    """
    Summarize a batch of self-checks.

    Args:
        checks: Check records produced by any module

    Returns:
        Tuple of (level, passed_count, failed_names):
        - level: "PASS" when every check holds (or there are none), else "FAIL"
        - passed_count: number of passing checks
        - failed_names: names of the failing checks, in order
    """
    failed = [c.name for c in checks if not c.passed]
    level = "FAIL" if failed else "PASS"
    return level, len(checks) - len(failed), failed


def exit_code_for(checks: List[Check]) -> int:
    """0 when every check holds, 3 otherwise."""
    level, _, _ = summarize_checks(checks)
    return 0 if level == "PASS" else 3


def format_check(check: Check) -> str:
    marker = "✓" if check.passed else "✗"
    return f"{marker} {check.name}: lhs={check.lhs:.6g} rhs={check.rhs:.6g}"


if __name__ == "__main__":
    print("=" * 60)
    print("VALIDATOR SMOKE TEST")
    print("=" * 60)
    rows = [
        check_leq("key norm m=4", 0.41, 0.5),
        check_equal("catalan p=3", 5, 5),
        check_geq("pairing", 80.0, 90.02),
    ]
    for row in rows:
        print(format_check(row))
    print(summarize_checks(rows))
