import io
import json
import subprocess
import sys

import pytest

from kitepea import ConfigError
from kitepea.cli import SUITES, main, parse_config, run_suites

BASE = {"group": {"kind": "integers"}, "index_size": 2, "lambda": [0, 1], "rho": [1, 0], "bound": 1}


def cfg(**kw):
    doc = dict(BASE)
    doc.update(kw)
    for k, v in list(doc.items()):
        if v is None:
            del doc[k]
    return doc


def run(argv):
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


@pytest.mark.parametrize(
    "doc,path,fragment",
    [
        (cfg(colour=1), "colour", "unknown key"),
        (cfg(index_size=float("inf")), "index_size", "countable"),
        (cfg(index_size="aleph0"), "index_size", "must be finite"),
        (cfg(phi=[1, 0]), "phi", "exactly one"),
        (cfg(**{"lambda": [0, 0]}), "lambda", "not a bijection at lambda: [0, 0]"),
        (cfg(rho=[0, 1, 2]), "rho", "length"),
        (cfg(group={"kind": "reals"}), "group.kind", "expected one of"),
        (cfg(group={"kind": "integers", "dim": 2}), "group.dim", "only meaningful"),
        (cfg(suites=["pea_axioms", "nope"]), "suites[1]", "unknown suite"),
        (cfg(bound=0), "bound", "at least 1"),
        (cfg(bound=40, window_cap=100), "bound", "exceeds the cap"),
    ],
)
def test_config_errors(doc, path, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.path == path
    assert fragment in exc.value.message


def test_config_sources_agree(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(BASE))
    a, b, c = parse_config(BASE), parse_config(json.dumps(BASE)), parse_config(str(p))
    assert a.digest() == b.digest() == c.digest()
    assert a.phi.images == (1, 0)


def test_all_suites_pass():
    code, text = run(["check", "--config", json.dumps(cfg(n=2, suites=list(SUITES)))])
    assert code == 0, text
    assert "0 fail" in text


def test_affine_statuses():
    doc = {"group": {"kind": "affine_rational"}, "index_size": 1, "phi": [0], "samples": 30,
           "suites": ["pea_axioms", "rdp_classify", "mv", "irreducibility"]}
    reports = {r.name: r for r in run_suites(parse_config(doc))}
    assert all(c.status.value == "skipped" for c in reports["rdp_classify"].checks)
    assert reports["mv"].ok and reports["pea_axioms"].ok
    assert any(c.status.value == "unknown" for c in reports["irreducibility"].checks)


def test_trivial_group_classify():
    doc = {"group": {"kind": "trivial"}, "index_size": 2, "lambda": [1, 0], "rho": [0, 1]}
    code, text = run(["classify", "--config", json.dumps(doc)])
    assert code == 0
    assert "2-element Boolean algebra" in text


def test_empty_suites_json():
    code, text = run(["check", "--json", "--config", json.dumps(cfg())])
    assert code == 0
    doc = json.loads(text)
    assert doc["suites"] == [] and len(doc["config_digest"]) == 64


@pytest.mark.parametrize("n,symmetric", [(1, False), (2, True), (3, False)])
def test_symmetry_prediction_uses_phi_power(n, symmetric):
    doc = {"group": {"kind": "integers"}, "index_size": 2, "phi": [1, 0], "n": n, "bound": 1, "suites": ["symmetric"]}
    (rep,) = run_suites(parse_config(doc))
    assert rep.ok
    assert rep.checks[0].detail.startswith("symmetric" if symmetric else "not symmetric")


def test_iso_needs_the_bijections():
    doc = {"group": {"kind": "integers"}, "index_size": 2, "phi": [1, 0], "suites": ["iso"]}
    code, text = run(["check", "--json", "--config", json.dumps(doc)])
    assert code == 0
    assert json.loads(text)["suites"][0]["checks"][0]["status"] == "skipped"


def test_json_is_deterministic():
    argv = ["check", "--json", "--config", json.dumps(cfg(suites=["pea_axioms", "rip", "mv"]))]
    assert run(argv)[1] == run(argv)[1]
    assert '"elapsed_ms": 0' in run(argv)[1]


def test_usage_errors_exit_two(capsys):
    assert run(["check", "--config", "{not json"])[0] == 2
    assert "malformed JSON" in capsys.readouterr().err
    assert run(["check", "--config", "/nonexistent/x.json"])[0] == 2
    assert run(["check", "--config", json.dumps(BASE), "--bound", "0"])[0] == 2
    assert run(["frobnicate"])[0] == 2


def test_refine_verb():
    doc = {"group": {"kind": "integers"}, "index_size": 2, "phi": [1, 0], "n": 2}
    code, text = run(["refine", "--config", json.dumps(doc), "(1)[-2,1]", "(0)[0,0]", "(1)[-2,1]", "(0)[0,0]"])
    assert code == 0
    assert "case iii" in text and "verified: True" in text
    code, text = run(["refine", "--json", "--search", "--config", json.dumps(doc),
                      "(1)[-2,1]", "(0)[0,0]", "(1)[-2,1]", "(0)[0,0]"])
    assert json.loads(text)["verified"] is True
    code, _ = run(["refine", "--config", json.dumps(doc), "(1)[-2,1]", "(0)[0,0]", "(0)[0,0]", "(0)[0,0]"])
    assert code == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "kitepea", "classify", "--config", json.dumps(cfg())],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0
    assert "subdirectly irreducible: yes" in out.stdout
