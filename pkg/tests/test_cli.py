import json
import os
import re
import subprocess
import sys
import time

import pytest

from apm.cli import EXIT_INPUT, EXIT_OK, EXIT_UNKNOWN, EXIT_VIOLATION, main
from apm.report import SCHEMA

from conftest import SPECS

SPEC_FILES = ("b3.apm", "intro-linear.apm", "group-b3.apm", "modc-sanity.apm")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def spec(name):
    return os.path.join(SPECS, name)


@pytest.mark.parametrize("name, code", [
    ("b3.apm", EXIT_VIOLATION),
    ("group-b3.apm", EXIT_VIOLATION),
    ("intro-linear.apm", EXIT_UNKNOWN),
    ("modc-sanity.apm", EXIT_OK),
])
def test_check_exit_codes(capsys, name, code):
    assert run(capsys, "check", spec(name))[0] == code


def test_input_errors(capsys, tmp_path):
    code, out, err = run(capsys, "check", str(tmp_path / "missing.apm"))
    assert code == EXIT_INPUT and out == "" and err.startswith("apm: error:")
    bad = tmp_path / "bad.apm"
    bad.write_text("theory Mon\nconstants s\nrule a: sx => s\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == EXIT_INPUT and "line 3" in err
    code, _, err = run(capsys, "normalize", spec("b3.apm"), "s.q")
    assert code == EXIT_INPUT


def test_check_json_non_confluent(capsys):
    code, out, _ = run(capsys, "check", spec("b3.apm"), "--format", "json")
    r = json.loads(out)
    assert r["schema"] == SCHEMA and r["verdict"] == "NON_CONFLUENT"
    assert set(r["preconditions"]) >= {"quasi_termination", "positive_confluence"}
    assert set(r["bounds"]) == {"max_class", "max_terms", "max_depth", "insertion_bound", "join_depth"}
    (b,) = r["critical_branchings"]
    assert b["source"] == "ststs" and b["status"] == "NON_CONFLUENT"
    assert sorted(w for side in b["witnesses"] for w in side) == ["sttst", "tstts"]


def test_check_json_confluent_diagram(capsys, tmp_path):
    f = tmp_path / "c.apm"
    f.write_text("theory Mon\nconstants a b\nrule r: ab => ba\nrule s: aa => a\n")
    code, out, _ = run(capsys, "check", str(f), "--format", "json")
    r = json.loads(out)
    assert code == EXIT_OK and r["verdict"] == "CONFLUENT"
    assert r["critical_branchings"]
    for b in r["critical_branchings"]:
        d = b["diagram"]
        assert b["status"] == "CONFLUENT" and isinstance(d["meet"], str)
        # a closing path starts at its side of the branching
        for side, path in (("left", d["left_path"]), ("right", d["right_path"])):
            if path:
                assert path[0]["source"].replace(".", "").replace("(", "").replace(")", "") == b[side + "_target"]


def test_empty_critical_set(capsys):
    code, out, _ = run(capsys, "critical-pairs", spec("modc-sanity.apm"), "--format", "json")
    r = json.loads(out)
    assert code == EXIT_OK and r["critical_branchings"] == [] and r["completeness"] == "EXACT"


def test_dot_one_cluster_per_branching(capsys):
    _, out, _ = run(capsys, "check", spec("b3.apm"), "--format", "dot")
    assert out.startswith("digraph apm {") and out.rstrip().endswith("}")
    assert len(re.findall(r"subgraph cluster_\d+", out)) == 1
    assert out.count("{") == out.count("}")


def test_dot_closing_paths_dashed(capsys, tmp_path):
    f = tmp_path / "c.apm"
    f.write_text("theory Mon\nconstants a b\nrule r: ab => ba\nrule s: aa => a\n")
    _, js, _ = run(capsys, "check", str(f), "--format", "json")
    n = len(json.loads(js)["critical_branchings"])
    _, out, _ = run(capsys, "check", str(f), "--format", "dot")
    assert len(re.findall(r"subgraph cluster_\d+", out)) == n > 0
    assert out.count("style=dashed") == 2 * n


def test_reports_are_byte_identical_across_processes():
    outs = []
    for _ in range(2):
        p = subprocess.run([sys.executable, "-m", "apm.cli", "check", spec("group-b3.apm"), "--format", "json"],
                           capture_output=True, env={**os.environ, "PYTHONHASHSEED": "random"})
        outs.append(p.stdout)
    assert outs[0] == outs[1] and outs[0]


def test_normalize_module_sum(capsys):
    code, out, _ = run(capsys, "normalize", spec("modc-sanity.apm"), "a (+) a")
    assert code == EXIT_OK and out == "2*a\n"


def test_quotient_presentation(capsys):
    code, out, _ = run(capsys, "quotient", spec("b3.apm"))
    assert code == EXIT_OK and "<s,t | sts => tst>" in out.splitlines()


def test_rewrite_lists_steps(capsys):
    code, out, _ = run(capsys, "rewrite", spec("b3.apm"), "ststs", "--format", "json")
    r = json.loads(out)
    assert code == EXIT_OK and len(r["steps"]) == 2 and all(s["rule"] == "alpha" for s in r["steps"])
    assert r["reachability"]["complete"] and r["quasi_normal_form"] == {"term": "sttst", "distance": 1}


def test_termination_with_seed_file(capsys, tmp_path):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("# one per line\nxy\n")
    code, out, _ = run(capsys, "termination", spec("intro-linear.apm"), "--seed-terms", str(seeds))
    assert code == EXIT_VIOLATION and "cycle: xy -> xz -> xy" in out


def test_env_bound_override_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("APM_MAX_TERMS", "17")
    _, out, _ = run(capsys, "critical-pairs", spec("b3.apm"), "--format", "json")
    assert json.loads(out)["bounds"]["max_terms"] == 17
    _, out, _ = run(capsys, "critical-pairs", spec("b3.apm"), "--format", "json", "--max-terms", "23")
    assert json.loads(out)["bounds"]["max_terms"] == 23
    monkeypatch.setenv("APM_MAX_TERMS", "lots")
    assert run(capsys, "check", spec("b3.apm"))[0] == EXIT_INPUT


def test_bound_flags(capsys):
    _, out, _ = run(capsys, "critical-pairs", spec("group-b3.apm"), "--format", "json", "--max-class", "9",
                    "--max-depth", "5", "--insertion-bound", "2", "--join-depth", "4")
    assert json.loads(out)["bounds"] == {"max_class": 9, "max_terms": 10000, "max_depth": 5,
                                         "insertion_bound": 2, "join_depth": 4}
    assert run(capsys, "check", spec("b3.apm"), "--max-depth", "0")[0] == EXIT_INPUT


@pytest.mark.parametrize("name", SPEC_FILES)
def test_spec_files_run_quickly(capsys, name):
    for cmd in ("check", "critical-pairs", "quotient", "termination"):
        t0 = time.perf_counter()
        code, out, _ = run(capsys, cmd, spec(name), "--format", "json")
        assert time.perf_counter() - t0 < 5
        assert code != EXIT_INPUT and json.loads(out)["command"] == cmd


def test_divergence_without_termination(capsys, tmp_path):
    f = tmp_path / "d.apm"
    f.write_text("theory Mon\nconstants a\nrule p: aa => aaa\nrule q: aaa => aaaa\nrule r: aa => 1\n")
    code, out, _ = run(capsys, "check", str(f))
    assert code == EXIT_VIOLATION
    assert "(sampled) [sampled]: 1 <- -> a  NON_CONFLUENT" in out
    assert "note: aa reaches distinct irreducible classes 1 and a" in out
