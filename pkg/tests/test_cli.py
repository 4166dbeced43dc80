import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from schmidt_scope import max_entangled, random_state, werner
from schmidt_scope.cli import main, parse_criteria, UsageError
from schmidt_scope.fileio import (FileFormatError, channel_doc, dumps, loads, parse_channel, parse_state,
                                  state_doc)
from schmidt_scope.channels import random_channel

from conftest import ket, proj


def write(path, doc):
    path.write_text(dumps(doc))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- file formats -----------------------------------------------------------------

def test_state_round_trip_is_lossless():
    s = random_state(2, 3, 4)
    doc = loads(dumps(state_doc(s)).encode())
    back = parse_state(doc)
    assert np.array_equal(back.rho, s.rho)
    assert dumps(state_doc(back)) == dumps(state_doc(s))


def test_channel_round_trip():
    ch = random_channel(2, 3, 1)
    back = parse_channel(loads(dumps(channel_doc(ch)).encode()))
    assert (back.in_dim, back.out_dim) == (2, 3)
    assert all(np.array_equal(a, b) for a, b in zip(ch.kraus, back.kraus))


@pytest.mark.parametrize("doc,field", [
    ({"kind": "state", "na": 2, "re": [[1]]}, "nb"),
    ({"kind": "state", "na": 2, "nb": 2, "re": [[1, 0], [0]]}, "re"),
    ({"kind": "state", "na": 2, "nb": 2, "re": [[0.25] * 4] * 4, "im": [[0] * 3] * 4}, "im"),
    ({"kind": "channel", "na": 2}, "kind"),
    ({"kind": "state", "na": "two", "nb": 2, "re": []}, "na"),
    ({"kind": "channel", "in_dim": 2, "out_dim": 2, "kraus": [{"re": [[1, 0]]}]}, "kraus[0].re"),
])
def test_malformed_documents_name_the_field(doc, field):
    parse = parse_channel if doc.get("kind") == "channel" and "in_dim" in doc else parse_state
    with pytest.raises(FileFormatError) as info:
        parse(doc)
    assert info.value.field == field


def test_not_json():
    with pytest.raises(FileFormatError):
        loads(b"{nope")


def test_parse_criteria():
    specs = parse_criteria("rc,sympoly:l=4,theta:0.5,zhang,filter:a.json,b.json")
    assert [n for n, _ in specs] == ["rc", "sympoly", "theta", "zhang", "filter"]
    assert specs[1][1] == {"l": 4, "use_rank": True}
    assert specs[4][1]["file_b"] == "b.json"
    assert parse_criteria("sympoly:norank")[0][1] == {"l": None, "use_rank": False}
    for bad in ("foo", "theta:x", "filter:a.json", "sympoly:q", ""):
        with pytest.raises(UsageError):
            parse_criteria(bad)


# -- commands -----------------------------------------------------------------------

def test_schmidt_bell(tmp_path, capsys):
    path = write(tmp_path / "bell.json", state_doc(max_entangled(2)))
    code, out, _ = run(["schmidt", path], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["spectrum"] == pytest.approx([0.5] * 4, abs=1e-12) and rep["rank"] == 4
    assert rep["purity"] == pytest.approx(1) and rep["sum_mu_squared"] == pytest.approx(1)
    assert rep["sym_polys"] == pytest.approx([2, 1.5, 0.5, 0.0625])
    assert rep["input"]["sha256"] == hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_schmidt_product(tmp_path, capsys):
    path = write(tmp_path / "product.json", state_doc(proj(ket(0, 1)), 2, 2))
    code, out, _ = run(["schmidt", path], capsys)
    assert code == 0 and json.loads(out)["spectrum"] == [1.0, 0.0, 0.0, 0.0]


def test_schmidt_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "state", "na": 2, "nb": 2}')
    code, out, err = run(["schmidt", str(bad)], capsys)
    assert code == 2 and "re" in err and out == ""
    path = write(tmp_path / "neg.json", state_doc(np.diag([1.5, -0.5, 0, 0]), 2, 2))
    code, _, err = run(["schmidt", path], capsys)
    assert code == 3 and "NotPositive" in err
    code, out, _ = run(["schmidt", "--no-validate", path], capsys)
    assert code == 0 and json.loads(out)["rank"] == 1
    code, _, _ = run(["schmidt", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_check_bell_and_mixed(tmp_path, capsys):
    bell = write(tmp_path / "bell.json", state_doc(max_entangled(2)))
    code, out, _ = run(["check", bell, "--criteria", "rc"], capsys)
    rep = json.loads(out)
    assert code == 1 and rep["summary"] == "EntanglementDetected"
    assert rep["criteria"][0]["lhs"] == pytest.approx(2.0)
    mixed = write(tmp_path / "mixed.json", state_doc(np.eye(4) / 4, 2, 2))
    code, out, _ = run(["check", mixed, "--criteria", "rc,zhang"], capsys)
    rep = json.loads(out)
    assert code == 0 and [c["verdict"] for c in rep["criteria"]] == ["Inconclusive"] * 2


def test_check_all_criteria(tmp_path, capsys):
    w = write(tmp_path / "w.json", state_doc(werner(0.7)))
    la = write(tmp_path / "la.json", {"re": [[1, 0], [0, 0.5]]})
    code, out, _ = run(["check", w, "--criteria", f"rc,sympoly,sympoly:l=2:norank,theta:0.0,zhang,filter:{la},{la}"],
                       capsys)
    rep = json.loads(out)
    assert code == 1
    ids = [c["criterion_id"] for c in rep["criteria"]]
    assert ids == ["rc"] + ["sympoly"] * 5 + ["theta", "zhang", "filter"]
    assert rep["criteria"][0]["verdict"] == "EntanglementDetected"
    detected = any(c["verdict"] == "EntanglementDetected" for c in rep["criteria"])
    assert (rep["summary"] == "EntanglementDetected") == detected


def test_check_unknown_criterion(tmp_path, capsys):
    bell = write(tmp_path / "bell.json", state_doc(max_entangled(2)))
    code, _, err = run(["check", bell, "--criteria", "ppt"], capsys)
    assert code == 2 and "rc" in err and "zhang" in err


def test_check_non_contractive_raw_filter(tmp_path, capsys):
    bell = write(tmp_path / "bell.json", state_doc(max_entangled(2)))
    big = write(tmp_path / "big.json", {"re": [[2, 0], [0, 1]]})
    code, _, err = run(["check", bell, "--criteria", f"filter:{big},{big}:raw"], capsys)
    assert code == 3 and "L_A" in err


def test_tolerance_env_and_flag(tmp_path, capsys, monkeypatch):
    rho = np.eye(4) / 4
    rho[0, 0] += 1e-6
    path = write(tmp_path / "off.json", state_doc(rho, 2, 2))
    assert run(["check", path], capsys)[0] == 3
    monkeypatch.setenv("SCHMIDT_SCOPE_TOL", "1e-5")
    code, out, _ = run(["check", path], capsys)
    assert code == 0 and json.loads(out)["tolerances"]["trace"] == 1e-5
    assert run(["check", path, "--tol", "1e-9"], capsys)[0] == 3
    monkeypatch.setenv("SCHMIDT_SCOPE_TOL", "abc")
    assert run(["check", path], capsys)[0] == 2


def test_batch_ordering(tmp_path, capsys):
    d = tmp_path / "batch"
    d.mkdir()
    names = ["c.json", "a.json", "b.json"]
    for name, p in zip(names, [0.1, 0.9, 0.2]):
        write(d / name, state_doc(werner(p)))
    code, out, _ = run(["check", "--batch", str(d), "--criteria", "rc"], capsys)
    rep = json.loads(out)
    assert [r["input"]["path"].rsplit("/", 1)[1] for r in rep["reports"]] == sorted(names)
    assert [r["summary"] for r in rep["reports"]] == ["EntanglementDetected", "Inconclusive", "Inconclusive"]
    assert code == 1


def test_channel_command(tmp_path, capsys):
    ident = tmp_path / "id.json"
    assert run(["gen", "channel-identity", "-o", str(ident)], capsys)[0] == 0
    code, out, _ = run(["channel", str(ident), "--eb-check", "4"], capsys)
    assert code == 1 and json.loads(out)["summary"] == "NotEB"
    choi = tmp_path / "choi.json"
    assert run(["channel", str(ident), "--choi", str(choi)], capsys)[0] == 0
    s = parse_state(json.loads(choi.read_text()))
    assert np.abs(s.rho - max_entangled(2).rho).max() <= 1e-12

    dep = tmp_path / "dep.json"
    run(["gen", "channel-depolarizing", "--p", "1", "-o", str(dep)], capsys)
    code, out, _ = run(["channel", str(dep), "--eb-check", "1"], capsys)
    assert code == 0 and json.loads(out)["summary"] == "Inconclusive"

    bad = write(tmp_path / "bad.json", {"kind": "channel", "in_dim": 2, "out_dim": 2,
                                        "kraus": [{"re": [[1, 0], [0, 0.5]]}]})
    code, _, err = run(["channel", bad, "--eb-check", "1"], capsys)
    assert code == 3 and "7.500e-01" in err


def test_gen_ranges(capsys):
    assert run(["gen", "werner", "--p", "1.5"], capsys)[0] == 2
    assert run(["gen", "isotropic", "--f", "-1"], capsys)[0] == 2
    assert run(["gen", "random", "--na", "1"], capsys)[0] == 2
    assert run(["gen", "nonsense"], capsys)[0] == 2


def test_gen_pipeline(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(["gen", "bell", "-o", str(f)], capsys)
    assert run(["check", str(f), "--criteria", "rc"], capsys)[0] == 1
    sep = tmp_path / "sep.json"
    run(["gen", "separable", "--na", "2", "--nb", "3", "--seed", "3", "-o", str(sep)], capsys)
    assert run(["check", str(sep), "--criteria", "rc,zhang,sympoly"], capsys)[0] == 0


def test_gen_random_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run(["gen", "random", "--na", "2", "--nb", "3", "--seed", "7", "-o", str(path)], capsys)
    assert a.read_bytes() == b.read_bytes()
    s = parse_state(json.loads(a.read_text()))
    assert (s.na, s.nb) == (2, 3)


def cli(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "schmidt_scope", *args], input=stdin,
                          capture_output=True, text=True)


def test_subprocess_stdin_pipeline():
    gen = cli("gen", "werner", "--p", "0.25")
    assert gen.returncode == 0
    chk = cli("check", "-", "--criteria", "rc", stdin=gen.stdout)
    assert chk.returncode == 0
    assert json.loads(chk.stdout)["summary"] == "Inconclusive"
    chk = cli("check", "-", "--criteria", "rc", stdin=cli("gen", "werner", "--p", "0.7").stdout)
    assert chk.returncode == 1


def test_subprocess_usage_error():
    res = cli("check")
    assert res.returncode == 2 and res.stdout == ""
