from __future__ import annotations

import json

import pytest

from seqmatch.cli import main
from seqmatch.fixtures import catalog
from seqmatch.generators import random_instance, random_order, rng
from seqmatch.io import (
    instance_from_json,
    instance_to_json,
    load_instance,
    load_order,
    order_from_data,
    order_to_json,
    save_instance,
)
from seqmatch.model import OrderError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    assert main(["fixtures", "--export", str(tmp_path)]) == 0
    capsys.readouterr()
    return tmp_path


def test_fixture_round_trip_is_byte_identical():
    for fx in catalog().values():
        text = instance_to_json(fx.instance)
        again = instance_from_json(text)
        assert again == fx.instance
        assert instance_to_json(again) == text


def test_random_round_trip(tmp_path):
    r = rng(91)
    for k in range(100):
        I = random_instance(r, r.randint(0, 5), r.randint(0, 5), density=r.random())
        path = tmp_path / f"i{k}.inst"
        save_instance(I, path)
        assert load_instance(path) == I
        sig = random_order(r, I)
        opath = tmp_path / f"i{k}.ord"
        opath.write_text(order_to_json(sig))
        assert load_order(I, opath) == sig


def test_order_formats():
    I = catalog()["three_firm"].instance
    a = order_from_data(I, {"position_order": ["p2", "p3", "p1"]})
    b = order_from_data(I, {"pairs": [list(e) for e in a.pairs]})
    assert a == b
    with pytest.raises(OrderError):
        order_from_data(I, {"pairs": [["p2", "q1"], ["p2", "q2"]]})
    with pytest.raises(OrderError):
        order_from_data(I, {"sequence": []})


def test_solve_prints_three_firm_equilibrium(capsys, files):
    code, out, _ = run(capsys, "solve", "--instance", str(files / "three_firm.inst"),
                       "--order", str(files / "three_firm_sigma.ord"))
    assert code == 0
    assert out.strip() == "{(p1,q1), (p2,q3), (p3,q2)}"
    code, out, _ = run(capsys, "solve", "--instance", str(files / "three_firm.inst"),
                       "--order", str(files / "three_firm_sigma_prime.ord"))
    assert out.strip() == "{(p1,q1), (p2,q2), (p3,q3)}"


def test_json_output_is_deterministic(capsys, files):
    args = ["solve", "--instance", str(files / "weak_stability.inst"), "--format", "json"]
    outs = {run(capsys, *args)[1] for _ in range(3)}
    assert len(outs) == 1
    data = json.loads(outs.pop())
    assert list(data) == ["matching", "first_action", "nodes_visited", "memo_hits"]
    assert data["matching"] == [["p1", "q2"], ["p2", "q3"], ["p3", "q1"]]


def test_every_command_runs(capsys, files, tmp_path):
    inst = str(files / "weak_stability.inst")
    for argv in (
        ["spem", "--instance", inst],
        ["qopt", "--instance", inst, "--trace"],
        ["popt", "--instance", inst, "--trace", "--format", "json"],
        ["sfda", "--instance", inst],
        ["design-order", "--instance", inst, "--verify", "--out", str(tmp_path / "d.ord")],
        ["design-order", "--instance", inst, "--search-position-based"],
        ["analyze", "--instance", inst, "--checks", "stable,essential"],
        ["enumerate-spe", "--instance", inst, "--report"],
        ["export-tree", "--instance", inst],
        ["export-tree", "--instance", inst, "--format", "json"],
    ):
        code, out, err = run(capsys, *argv)
        assert code == 0, (argv, err)
        assert out
    assert load_order(load_instance(inst), tmp_path / "d.ord")


def test_analyze_reports_blocking_pair(capsys, files):
    code, out, _ = run(capsys, "analyze", "--instance", str(files / "weak_stability.inst"),
                       "--order", str(files / "weak_stability_sigma.ord"), "--format", "json")
    data = json.loads(out)
    assert data["stable"] is False and data["blocking"] == [["p2", "q2"]]
    assert data["vnm_member"] is False and data["essentially_stable_workers"] is False


def test_enumerate_spe_two_by_two(capsys, files):
    code, out, _ = run(capsys, "enumerate-spe", "--instance", str(files / "two_by_two.inst"), "--format", "json")
    assert json.loads(out) == {"spe_set": [[["p1", "q1"], ["p2", "q2"]]]}


def test_reduce_then_decide(capsys, tmp_path):
    # exists v1 forall v2 . (v1 | v2 | ~v2) is true
    q = tmp_path / "t.qdimacs"
    q.write_text("p cnf 2 1\ne 1 0\na 2 0\n1 2 -2 0\n")
    inst, order = tmp_path / "r.inst", tmp_path / "r.ord"
    code, out, _ = run(capsys, "reduce", "--qbf", str(q), "--out", str(inst), "--order-out", str(order))
    assert code == 0 and "widths (3, 3)" in out
    assert run(capsys, "spem", "--instance", str(inst))[1].strip() == "REJECT"
    assert run(capsys, "spem", "--instance", str(inst), "--order", str(order))[1].strip() == "REJECT"
    # forall v1 . (v1 | v1 | v1) is false
    q.write_text("p cnf 1 1\na 1 0\n1 1 1 0\n")
    run(capsys, "reduce", "--qbf", str(q), "--out", str(inst))
    assert run(capsys, "spem", "--instance", str(inst))[1].strip() == "ACCEPT"


def test_exit_codes(capsys, files, tmp_path):
    code, _, err = run(capsys, "solve", "--instance", str(tmp_path / "missing.inst"))
    assert code == 1 and "error" in err
    bad = tmp_path / "bad.inst"
    bad.write_text(json.dumps({"firms": ["p1"], "workers": [], "firm_prefs": {"p1": ["q1"]}, "worker_prefs": {}}))
    assert run(capsys, "solve", "--instance", str(bad))[0] == 1
    q = tmp_path / "bad.qdimacs"
    q.write_text("p cnf 1 1\ne 1 0\n1 1 0\n")
    assert run(capsys, "reduce", "--qbf", str(q), "--out", str(tmp_path / "x.inst"))[0] == 1
    code, _, err = run(capsys, "solve", "--instance", str(files / "three_firm.inst"), "--node-budget", "2")
    assert code == 2 and "resource cap" in err
    code, _, _ = run(capsys, "enumerate-spe", "--instance", str(files / "three_firm.inst"), "--max-orders", "5")
    assert code == 2
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_fixtures_run_all(capsys):
    code, out, _ = run(capsys, "fixtures", "--run-all")
    assert code == 0
    last = out.strip().splitlines()[-1]
    passed, total = last.split()[0].split("/")
    assert passed == total and int(total) > 0


def test_png_outputs(capsys, files, tmp_path):
    png = tmp_path / "tree.png"
    code, _, _ = run(capsys, "export-tree", "--instance", str(files / "three_firm.inst"), "--format", "png",
                     "--out", str(png))
    assert code == 0 and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    figs = tmp_path / "figs"
    assert main(["fixtures", "--figures", str(figs)]) == 0
    assert len(list(figs.glob("*.png"))) == sum(len(fx.position_orders) for fx in catalog().values())
    assert run(capsys, "export-tree", "--instance", str(files / "three_firm.inst"), "--format", "png")[0] == 1
