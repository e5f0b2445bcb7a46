from datetime import datetime, timedelta, timezone

from hypothesis import given, settings
from hypothesis import strategies as st

from dmriqc.model import EntityRef, QcVerdict, VerdictStatus, latest_verdicts

E = EntityRef("sub1", "ses1", "scanA")
T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


def verdict(status, minutes=0, uid="u1", node="PreQual", unit=None):
    return QcVerdict(
        entity=E,
        node=node,
        unit=unit,
        status=status,
        rater_id="r",
        timestamp=T0 + timedelta(minutes=minutes),
        verdict_uid=uid,
    )


def test_last_write_wins():
    ledger = [
        verdict(VerdictStatus.FAIL, minutes=1, uid="a"),
        verdict(VerdictStatus.PASS, minutes=2, uid="b"),
    ]
    out = latest_verdicts(ledger)
    assert out[(E, "PreQual", None)].status is VerdictStatus.PASS


def test_empty_ledger():
    assert latest_verdicts([]) == {}


def test_equal_timestamp_tie_breaks_by_uid():
    ledger = [
        verdict(VerdictStatus.FAIL, minutes=5, uid="a"),
        verdict(VerdictStatus.PASS, minutes=5, uid="b"),
    ]
    out = latest_verdicts(ledger)
    assert out[(E, "PreQual", None)].verdict_uid == "b"
    # Order independence.
    assert latest_verdicts(ledger[::-1])[(E, "PreQual", None)].verdict_uid == "b"


def test_units_are_separate_keys():
    ledger = [
        verdict(VerdictStatus.PASS, uid="a", node="Tractseg", unit="AF_right"),
        verdict(VerdictStatus.FAIL, uid="b", node="Tractseg", unit="CC_5"),
    ]
    out = latest_verdicts(ledger)
    assert len(out) == 2


def test_roundtrip_dict():
    v = verdict(VerdictStatus.NOT_RUN, uid="x", unit=None)
    assert QcVerdict.from_dict(v.to_dict()) == v


statuses = st.sampled_from(list(VerdictStatus))


@st.composite
def ledgers(draw):
    # verdict_uid uniqueness is a ledger invariant; the index suffix
    # keeps drawn uids distinct while still varying their sort order.
    n = draw(st.integers(0, 25))
    out = []
    for i in range(n):
        out.append(
            verdict(
                draw(statuses),
                minutes=draw(st.integers(0, 5)),
                uid=draw(st.text("abcdef", min_size=1, max_size=3)) + f"-{i}",
                node=draw(st.sampled_from(["A", "B"])),
            )
        )
    return out


@settings(max_examples=80, deadline=None)
@given(ledgers(), st.randoms())
def test_latest_verdicts_permutation_invariant_and_idempotent(ledger, rnd):
    base = latest_verdicts(ledger)
    shuffled = list(ledger)
    rnd.shuffle(shuffled)
    assert latest_verdicts(shuffled) == base
    # Idempotence: feeding the winners back in reproduces them.
    assert latest_verdicts(list(base.values())) == base
