import pytest

from plwe.modarith import RingSpec
from plwe.paramgen import default_residues, smallest_residue_of_order, split_polynomial


def desk_ring(q: int, n: int, anchor: int) -> RingSpec:
    """A certified-irreducible f of degree n that splits mod q and vanishes at anchor."""
    residues = default_residues(anchor, n, q)
    f, _ = split_polynomial(q, residues)
    return RingSpec(f, q, tuple(r % q for r in residues))


@pytest.fixture(scope="session")
def ring_alpha_one():
    """n = 16, q = 40961 < 2^16, f(1) = 0 mod q."""
    return desk_ring(40961, 16, 1)


@pytest.fixture(scope="session")
def ring_order_three():
    """n = 16, q = 40009 = 1 mod 3, f vanishing at the smallest order-3 residue."""
    q = 40009
    alpha = smallest_residue_of_order(3, q).n_rq % q
    return desk_ring(q, 16, alpha), alpha


# --- acceptance report -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(label: str, ok: bool, detail: str) -> None:
        line = "%s %s: %s" % ("PASS" if ok else "FAIL", label, detail)
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
