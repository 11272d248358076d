"""Claim verdicts shared by the verifiers and the certificate writer."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from kdist.exact import compare, fmt, mid

CERTIFIED = "CERTIFIED"
REGIME_ONLY = "REGIME-ONLY"
FAILED = "FAILED"


@dataclass(frozen=True)
class ClaimResult:
    name: str
    verdict: str
    measured: str = ""
    bound: str = ""
    detail: str = ""
    expected: str = CERTIFIED  # what a correct build should produce

    @property
    def ok(self) -> bool:
        return self.verdict != FAILED or self.expected == FAILED


def _show(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, Fraction)):
        return fmt(v)
    return f"~{mid(v):.6g}"


def check(name: str, lhs, op: str, rhs, regime: bool = False, detail: str = "") -> ClaimResult:
    """Exact (or interval) comparison lhs op rhs.

    A failed comparison is REGIME-ONLY when the claim is only guaranteed for
    large parameters, FAILED otherwise; an undecidable interval comparison is
    REGIME-ONLY as well.
    """
    c = compare(lhs, rhs)
    if c is None:
        ok = None
    else:
        ok = {"<": c < 0, "<=": c <= 0, "==": c == 0, ">=": c >= 0, ">": c > 0}[op]
    if ok:
        verdict = CERTIFIED
    elif regime or ok is None:
        verdict = REGIME_ONLY
    else:
        verdict = FAILED
    return ClaimResult(name, verdict, _show(lhs), f"{op} {_show(rhs)}", detail,
                       REGIME_ONLY if regime else CERTIFIED)


@dataclass
class Report:
    subject: str
    claims: list = field(default_factory=list)
    data: dict = field(default_factory=dict)  # exact values behind the claims, for cross-checks

    def add(self, r: ClaimResult) -> ClaimResult:
        self.claims.append(r)
        return r

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.claims)

    def verdicts(self) -> dict:
        return {c.name: c.verdict for c in self.claims}

    def lines(self) -> list[str]:
        out = []
        for c in self.claims:
            tail = f" ({c.detail})" if c.detail else ""
            out.append(f"{c.verdict:12s} {c.name}: {c.measured} {c.bound}{tail}".rstrip())
        return out
