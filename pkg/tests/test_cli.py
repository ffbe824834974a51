import json

import pytest

from bicrossed import __version__
from bicrossed.cli import Workspace, main

S3_FILE = {"name": "S3", "permutations": [[1, 0, 2], [1, 2, 0]]}


def run(ws, *args, capsys=None):
    code = main(["-w", str(ws), *args])
    out = capsys.readouterr().out if capsys else ""
    return code, (json.loads(out) if out.strip().startswith("{") else out)


@pytest.fixture
def s3(tmp_path):
    path = tmp_path / "s3.json"
    path.write_text(json.dumps(S3_FILE))
    return path


def split_name(ws, capsys, s3):
    code, out = run(ws, "factorize", str(s3), capsys=capsys)
    assert code == 0
    return next(f["name"] for f in out["factorizations"] if (f["F_order"], f["G_order"]) == (2, 3))


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_factorize_lists_the_z2_z3_pair(tmp_path, s3, capsys):
    code, out = run(tmp_path / "ws", "factorize", str(s3), capsys=capsys)
    assert code == 0 and out["group"] == "S3"
    orders = {(f["F_order"], f["G_order"]) for f in out["factorizations"]}
    assert (2, 3) in orders and (3, 2) in orders


def test_pipeline_on_the_split_s3_pair(tmp_path, s3, capsys):
    ws = tmp_path / "ws"
    fact = split_name(ws, capsys, s3)
    assert run(ws, "matched", "verify", fact, capsys=capsys)[0] == 0
    code, out = run(ws, "opext", "solve", fact, "--N", "6", capsys=capsys)
    assert code == 0 and out["trivial"] and out["order"] == 1
    pair = out["classes"][0]
    code, out = run(ws, "omega", "compute", pair, capsys=capsys)
    assert code == 0 and out["zero"]
    assert run(ws, "verify", "pair", pair, capsys=capsys)[0] == 0
    assert run(ws, "verify", "cocycle", pair + "/omega", capsys=capsys)[0] == 0
    code, out = run(ws, "build", "bicrossed", pair, capsys=capsys)
    assert code == 0 and out["dim"] == 6
    assert run(ws, "verify", "hopf", out["name"], capsys=capsys)[0] == 0
    code, out = run(ws, "build", "double", pair, capsys=capsys)
    assert code == 0 and out["dim"] == 36
    code, out = run(ws, "compare", "doubles", pair, capsys=capsys)
    assert code == 0 and out["verdict"] == "consistent" and out["dims"] == [36, 36]
    code, out = run(ws, "build", "dpr", "S3", "--N", "6", capsys=capsys)
    assert code == 0 and out["kind"] == "quasi"
    assert run(ws, "verify", "quasi", out["name"], capsys=capsys)[0] == 0
    code, out = run(ws, "report", capsys=capsys)
    assert code == 0 and out["ok"] and len(out["reports"]) >= 5
    code, text = run(ws, "report", "--format", "markdown", capsys=capsys)
    assert code == 0 and "| report |" in text


def test_stored_objects_reload(tmp_path, s3, capsys):
    ws = tmp_path / "ws"
    fact = split_name(ws, capsys, s3)
    run(ws, "opext", "solve", fact, "--N", "6", capsys=capsys)
    store = Workspace(ws)
    pc, f, prov = store.pair(fact + "/N6/c0")
    assert prov["sigma"] == "S3" and prov["N"] == 6 and prov["class_index"] == 0
    assert f.F.order == 2 and pc.is_trivial()
    for name in store.names():
        store.raw(name)


def test_tampered_file_fails_validation(tmp_path, s3, capsys):
    ws = tmp_path / "ws"
    fact = split_name(ws, capsys, s3)
    store = Workspace(ws)
    path = ws / store.manifest[fact]["file"]
    path.write_text(path.read_text().replace('"F": [', '"F": [ ', 1))
    assert main(["-w", str(ws), "matched", "verify", fact]) == 1
    assert "manifest hash" in capsys.readouterr().err


def test_invalid_group_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"table": [[0, 1], [0, 1]]}))
    assert run(tmp_path / "ws", "group", "load", str(bad), capsys=capsys)[0] == 1


@pytest.mark.parametrize("argv", [["frobnicate"], ["matched", "verify", "missing"], ["factorize", "Q9"],
                                  ["build", "bicrossed"], ["group", "show", "nope.json"]])
def test_usage_errors_exit_2(tmp_path, argv, capsys):
    assert main(["-w", str(tmp_path / "ws"), *argv]) == 2


def test_verification_failure_exits_1_with_report(tmp_path, capsys):
    ws = tmp_path / "ws"
    run(ws, "group", "load", "D4", capsys=capsys)
    store = Workspace(ws)
    # a stored "pair" whose sigma breaks the cocycle law
    from bicrossed.cohomology import solve_opext
    from bicrossed.groups import derive_matched_pair, exact_factorizations, named_group
    f = exact_factorizations(named_group("D4"))[2]
    store.put("D4/f2", "factorization", {"group": "D4", "F": list(f.F_elems), "G": list(f.G_elems)})
    pc = solve_opext(derive_matched_pair(f), 8).classes()[-1]
    data = pc.to_json()
    data["sigma"][1][1][1] = (data["sigma"][1][1][1] + 1) % 8
    prov = {"sigma": "D4", "factorization": "D4/f2", "F": list(f.F_elems), "G": list(f.G_elems), "N": 8, "class_index": 9}
    store.put("D4/bad", "pair", {"pair": data, "provenance": prov})
    code, out = run(ws, "verify", "pair", "D4/bad", capsys=capsys)
    assert code == 1 and not out["report"]["ok"] and out["report"]["failures"]


def test_output_is_deterministic(tmp_path, s3, capsys):
    outputs = []
    for k in range(2):
        ws = tmp_path / f"ws{k}"
        fact = split_name(ws, capsys, s3)
        run(ws, "opext", "solve", fact, "--N", "6", capsys=capsys)
        out_file = tmp_path / f"cmp{k}.json"
        main(["-w", str(ws), "--out", str(out_file), "compare", "doubles", fact + "/N6/c0"])
        capsys.readouterr()
        outputs.append((out_file.read_bytes(), (ws / "manifest.json").read_bytes()))
    assert outputs[0] == outputs[1]


def test_group_show_named(tmp_path, capsys):
    code, out = run(tmp_path / "ws", "group", "show", "a4", capsys=capsys)
    assert code == 0 and out["order"] == 12 and sorted(out["class_sizes"]) == [1, 3, 4, 4]
