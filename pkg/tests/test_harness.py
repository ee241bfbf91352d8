import pytest

from weaktensor import harness
from weaktensor.core import Status


@pytest.mark.parametrize("check_id", list(harness.CHECKS))
def test_check_holds(check_id):
    v = harness.run(check_id, seed=0)
    assert v.holds, v.witness.get("red_alerts")
    assert all(inst["predicted"] == inst["observed"] for inst in v.witness["instances"])


def test_runs_are_deterministic():
    a = harness.run("T-TOP-COVER", seed=3)
    b = harness.run("T-TOP-COVER", seed=3)
    assert a.to_dict() == b.to_dict()


def test_covering_witnesses_recheck():
    v = harness.run("T-AERTS-COVER")
    r = harness.verify_witness(v)
    assert r.holds and r.witness["rechecked"] >= 1


def test_verify_witness_rejects_tampering():
    v = harness.run("T-AERTS-COVER")
    for inst in v.witness["instances"]:
        cw = inst.get("witness", {}).get("covering_witness")
        if cw and cw.get("kind") == "covering_failure":
            cw["between"] = list(cw["join"])
    assert harness.verify_witness(v).status is Status.FAILS


def test_unknown_check():
    with pytest.raises(harness.UnknownCheck):
        harness.run("T-NOPE")
    with pytest.raises(harness.UnknownCheck):
        harness.lattice("nope")


def test_lattice_names():
    assert harness.lattice("mo4").n_atoms == 4
    assert len(harness.lattice("2^3")) == 8
    assert len(harness.lattice("fano")) == harness.frozen("projective_2_3")
    assert len(harness.lattice("pg3_3")) == harness.frozen("projective_3_3")
    assert harness.lattice("mo3+2").n_atoms == 4
