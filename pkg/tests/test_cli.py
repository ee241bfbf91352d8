import json

import pytest

from weaktensor.cli import EXIT_BUDGET, EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE, main
from weaktensor.core import loads


@pytest.fixture
def files(tmp_path):
    def gen(name, *args):
        path = tmp_path / f"{name}.json"
        assert main(["gen", *args, "-o", str(path)]) == EXIT_OK
        return str(path)

    return {"mo3": gen("mo3", "--kind", "mo", "--n", "3"),
            "mo4": gen("mo4", "--kind", "mo", "--n", "4"),
            "p2": gen("p2", "--kind", "powerset", "--n", "2"),
            "dir": tmp_path}


def test_gen_and_product_counts(files):
    out = files["dir"] / "sep.json"
    assert main(["product", "--kind", "sep", files["mo3"], files["mo3"], "-o", str(out)]) == EXIT_OK
    assert len(loads(out.read_text())) == 44
    for kind, size in (("top", 50), ("circ", 50)):
        o = files["dir"] / f"{kind}.json"
        assert main(["product", "--kind", kind, files["mo3"], files["mo3"], "-o", str(o)]) == EXIT_OK
        assert len(loads(o.read_text())) == size


def test_seed_before_or_after_verb(files, capsys):
    assert main(["--seed", "5", "member", files["mo3"], files["mo3"], "--set", "(p0,p0)"]) == EXIT_OK
    assert main(["member", "--seed", "5", files["mo3"], files["mo3"], "--set", "(p0,p0)"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0]) == json.loads(lines[1]) == {"member": True, "set": ["(p0,p0)"]}


def test_join_of_xi_triple_is_itself(files, capsys):
    atoms = "(p0,p0) (p1,p1) (p2,p2)"
    assert main(["join", files["mo3"], files["mo3"], "--atoms", atoms]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["join"] == atoms.split()


def test_check_expect_exit_codes(files):
    sep = files["dir"] / "sep44.json"
    main(["product", "--kind", "sep", files["mo4"], files["mo4"], "-o", str(sep)])
    out = files["dir"] / "cov.json"
    assert main(["check", "covering", str(sep), "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["status"] == "fails" and "timing_seconds" in doc
    assert main(["check", "covering", str(sep), "--expect", "fails", "-o", str(out)]) == EXIT_OK
    assert main(["check", "covering", str(sep), "--expect", "holds", "-o", str(out)]) == EXIT_UNEXPECTED
    assert main(["check", "mo", "4", files["mo4"], "--expect", "holds", "-o", str(out)]) == EXIT_OK


def test_galois_and_export(files):
    out = files["dir"] / "g.json"
    assert main(["galois", files["p2"], files["mo3"], "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["maps"] == doc["members"] == 25
    dot = files["dir"] / "mo3.dot"
    assert main(["export-dot", files["mo3"], "-o", str(dot)]) == EXIT_OK
    assert dot.read_text().startswith("digraph")


def test_factor_bimorphism_table(files):
    top = files["dir"] / "top.json"
    main(["product", "--kind", "top", files["mo3"], files["mo3"], "-o", str(top)])
    table = files["dir"] / "table.txt"
    table.write_text("".join(f"p{i} p{j} -> (p{i},p{j})\n" for i in range(3) for j in range(3)))
    out = files["dir"] / "fb.json"
    assert main(["factor-bimorphism", files["mo3"], files["mo3"], str(top), str(table), "-o", str(out)]) == EXIT_OK


def test_hilbert_verbs(files, capsys):
    m = files["dir"] / "s.txt"
    m.write_text("1 0\n0 1\n")
    assert main(["hilbert", "member", "--matrix", str(m), "--p1", "(1,i)", "--p2", "(1,i)"]) == EXIT_OK
    out = files["dir"] / "w.json"
    assert main(["hilbert", "witnesses", "-o", str(out)]) == EXIT_OK


def test_theorem_run(files, capsys):
    res = files["dir"] / "res"
    assert main(["theorem", "run", "T-SINGLETON", "--results", str(res)]) == EXIT_OK
    assert json.loads((res / "T-SINGLETON.json").read_text())["status"] == "holds"
    assert main(["theorem", "run", "T-NOPE"]) == EXIT_USAGE


def test_usage_and_budget_errors(files):
    assert main(["product", "--kind", "sep", str(files["dir"] / "missing.json")]) == EXIT_USAGE
    assert main(["check", "mo", files["mo3"]]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["--budget", "5", "product", "--kind", "top", files["mo4"], files["mo4"],
                 "-o", str(files["dir"] / "x.json")]) == EXIT_BUDGET
