import json

import pytest

from colorcut import cli
from colorcut.formats import (
    parse_csp,
    parse_dcmc,
    parse_embedding,
    parse_graph,
    parse_psi,
)
from colorcut.graphs import random_max_degree3_graph
from colorcut.formats import write_graph
import random


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(stdout: str) -> dict:
    pairs = [line.split("=", 1) for line in stdout.strip().splitlines() if "=" in line]
    return {k: v for k, v in pairs}


@pytest.fixture
def files(tmp_path):
    def make(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return make


def test_solve_cnf_yes_and_no(capsys, files):
    sat = files("sat.cnf", "p cnf 2 1\n1 2 0\n")
    code, out, _ = run(capsys, "solve", "cnf", sat)
    assert code == 0
    assert report(out)["decision"] == "yes"
    assert report(out)["witness"] == "1 0"

    unsat = files("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n")
    code, out, _ = run(capsys, "solve", "cnf", unsat)
    assert code == 1
    assert report(out)["decision"] == "no"
    assert "witness" not in report(out)


def test_solve_cmc(capsys, files):
    yes = files("yes.cmc", "cmc 2 1 1 1\ne 0 1 1\n")
    code, out, _ = run(capsys, "solve", "cmc", yes)
    assert code == 0
    assert report(out)["witness"] == "0"
    no = files("no.cmc", "cmc 2 1 1 0\ne 0 1 1\n")
    assert run(capsys, "solve", "cmc", no)[0] == 1


def test_solve_dcmc_psi_csp(capsys, files):
    dcmc = files("a.dcmc", "dcmc 3 1 1\ng 1\ne 0 1\n")
    code, out, _ = run(capsys, "solve", "dcmc", dcmc)
    assert code == 0
    assert report(out)["witness"] == "1"

    psi = files("a.psi", "psi 2 1\npe 0 1\nblock 0 0\nblock 1 1\nhe 0 1\n")
    code, out, _ = run(capsys, "solve", "psi", psi)
    assert code == 0
    assert report(out)["witness"] == "0 1"

    csp = files("a.csp", "csp 1\ndom 0 a b\n")
    code, out, _ = run(capsys, "solve", "csp", csp)
    assert code == 0
    assert report(out)["witness"] == "a"


def test_error_exit_codes(capsys, files, tmp_path):
    assert run(capsys, "solve", "cmc", str(tmp_path / "absent.cmc"))[0] == 2
    bad = files("bad.cmc", "not a header\n")
    assert run(capsys, "solve", "cmc", bad)[0] == 2
    sat = files("cap.cnf", "p cnf 2 1\n1 2 0\n")
    code, _, err = run(capsys, "solve", "cnf", sat, "--cap-sat-variables", "1")
    assert code == 2
    assert "error" in err


def test_reduce_sat2csp(capsys, files, tmp_path):
    cnf = files("f.cnf", "p cnf 2 2\n1 2 0\n-1 0\n")
    out_csp = str(tmp_path / "f.csp")
    code, out, _ = run(capsys, "reduce", "sat2csp", cnf, "-o", out_csp)
    assert code == 0
    info = report(out)
    assert info["output"] == out_csp
    assert info["graph"] == out_csp + ".graph"
    csp = parse_csp(open(out_csp).read())
    assert csp.variable_count == 4
    graph = parse_graph(open(out_csp + ".graph").read())
    assert graph.vertex_count == 4

    custom = str(tmp_path / "inc.graph")
    run(capsys, "reduce", "sat2csp", cnf, "-o", out_csp, "--graph-out", custom)
    assert parse_graph(open(custom).read()) == graph


def _chain(capsys, tmp_path, files, cnf_text, name):
    cnf = files(f"{name}.cnf", cnf_text)
    csp_path = str(tmp_path / f"{name}.csp")
    emb_path = str(tmp_path / f"{name}.embed")
    routed_path = str(tmp_path / f"{name}.routed.csp")
    psi_path = str(tmp_path / f"{name}.psi")
    dcmc_path = str(tmp_path / f"{name}.dcmc")

    assert run(capsys, "reduce", "sat2csp", cnf, "-o", csp_path)[0] == 0
    assert run(capsys, "embed", csp_path + ".graph", "-k", "8", "-o", emb_path)[0] == 0
    assert run(capsys, "reduce", "route", csp_path, "--embed", emb_path, "-o", routed_path)[0] == 0
    assert (
        run(capsys, "reduce", "csp2psi", csp_path, "--embed", emb_path, "-o", psi_path)[0]
        == 0
    )
    assert run(capsys, "reduce", "psi2dcmc", psi_path, "-o", dcmc_path)[0] == 0

    sat_code = run(capsys, "solve", "cnf", cnf)[0]
    routed_code = run(capsys, "solve", "csp", routed_path)[0]
    psi_code = run(capsys, "solve", "psi", psi_path)[0]
    dcmc_code = run(capsys, "solve", "dcmc", dcmc_path)[0]
    assert routed_code == psi_code == dcmc_code == sat_code
    return sat_code


def test_stage_chain_preserves_decision(capsys, files, tmp_path):
    assert _chain(capsys, tmp_path, files, "p cnf 2 1\n1 2 0\n", "sat") == 0
    assert _chain(capsys, tmp_path, files, "p cnf 1 2\n1 0\n-1 0\n", "unsat") == 1


def test_reduce_psi2dcmc_connectivizes(capsys, files, tmp_path):
    edgeless = files("lonely.psi", "psi 2 1\nblock 0 0\nblock 1 1\n")
    out = str(tmp_path / "lonely.dcmc")
    code, text, _ = run(capsys, "reduce", "psi2dcmc", edgeless, "-o", out)
    assert code == 0
    info = report(text)
    assert info["connectivized"] == "1"
    assert parse_dcmc(open(out).read()).vertex_count == int(info["dual_vertices"])
    # vacuously satisfiable either side of the reduction
    assert run(capsys, "solve", "psi", edgeless)[0] == 0
    assert run(capsys, "solve", "dcmc", out)[0] == 0

    connected = files("pair.psi", "psi 2 1\npe 0 1\nblock 0 0\nblock 1 1\nhe 0 1\n")
    out2 = str(tmp_path / "pair.dcmc")
    custom_map = str(tmp_path / "pair.map")
    code, text, _ = run(
        capsys, "reduce", "psi2dcmc", connected, "-o", out2, "--map", custom_map
    )
    assert code == 0
    info = report(text)
    assert info["connectivized"] == "0"
    assert info["map"] == custom_map
    assert open(custom_map).read().startswith("gadgetmap 1\n")


def test_reduce_sat2dcmc_and_determinism(capsys, files, tmp_path):
    cnf = files("g.cnf", "p cnf 3 2\n1 -2 0\n2 3 0\n")
    out_a = str(tmp_path / "a.dcmc")
    code, text_a, _ = run(capsys, "reduce", "sat2dcmc", cnf, "-o", out_a)
    assert code == 0
    info = report(text_a)
    assert info["variables"] == "3" and info["clauses"] == "2"
    assert info["output"] == out_a
    dual = parse_dcmc(open(out_a).read())
    assert dual.vertex_count == int(info["dual_vertices"])
    assert run(capsys, "solve", "dcmc", out_a)[0] == 0  # formula is satisfiable

    out_b = str(tmp_path / "b.dcmc")
    _, text_b, _ = run(capsys, "reduce", "sat2dcmc", cnf, "-o", out_b)
    assert open(out_a).read() == open(out_b).read()
    assert open(out_a + ".gadgetmap").read() == open(out_b + ".gadgetmap").read()
    assert text_a.replace(out_a, "") == text_b.replace(out_b, "")


def test_embed_command(capsys, tmp_path):
    rng = random.Random(3)
    graph = random_max_degree3_graph(40, 50, rng)
    src = tmp_path / "g.graph"
    src.write_text(write_graph(graph))
    out = str(tmp_path / "g.embed")
    code, text, _ = run(capsys, "embed", str(src), "-k", "12", "-o", out)
    assert code == 0
    info = report(text)
    assert info["audit_bounded"] == "1"
    assert info["ell"] == "3"
    emb = parse_embedding(open(out).read())
    assert emb.host.vertex_count == 3
    assert int(info["depth"]) == emb.depth


def test_embed_failure_exit_code(capsys, tmp_path):
    rng = random.Random(4)
    graph = random_max_degree3_graph(60, 80, rng)
    src = tmp_path / "big.graph"
    src.write_text(write_graph(graph))
    code, _, err = run(
        capsys,
        "embed",
        str(src),
        "-k",
        "12",
        "-o",
        str(tmp_path / "x.embed"),
        "--big-c-hat",
        "0.01",
        "--embed-retries",
        "2",
    )
    assert code == 1
    assert "embedding failed" in err


def test_verify_suites_cli(capsys):
    code, out, _ = run(capsys, "verify", "duality", "--trials", "5")
    assert code == 0
    assert out.strip().splitlines()[-1] == "ok=1"
    assert "duality_ok=1" in out

    code, out, _ = run(capsys, "verify", "pipeline", "--trials", "3")
    assert code == 0
    assert "pipeline_ok=1" in out

    code, out, _ = run(capsys, "verify", "embedding", "--trials", "5")
    assert code == 0
    assert "embedding_ok=1" in out


def test_calibrate_cli(capsys):
    code, out, _ = run(capsys, "calibrate", "--trials", "3")
    assert code == 0
    info = report(out)
    assert "c_hat_observed" in info
    assert info["calibration_ok"] == "1"


def test_config_file_and_override(capsys, files, tmp_path):
    cnf = files("h.cnf", "p cnf 2 1\n1 2 0\n")
    conf = files("conf.json", json.dumps({"seed": 4}))
    out = str(tmp_path / "h.dcmc")
    _, text, _ = run(capsys, "reduce", "sat2dcmc", cnf, "-o", out, "--config", conf)
    assert report(text)["seed"] == "4"
    _, text, _ = run(
        capsys, "reduce", "sat2dcmc", cnf, "-o", out, "--config", conf, "--seed", "6"
    )
    assert report(text)["seed"] == "6"
