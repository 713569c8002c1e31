import io

import pytest

from sgmap import cli
from sgmap.aig import random_aig, write_aag
from sgmap.sglib import read_library
from sgmap.liberty import read_liberty
from sgmap import bundled_liberty
from conftest import sample_aig


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture()
def files(tmp_path):
    aig_path = tmp_path / "c.aag"
    aig_path.write_text(write_aag(random_aig(6, 80, 4, seed=4)))
    sample = tmp_path / "sample.aag"
    sample.write_text(write_aag(sample_aig()))
    return tmp_path, aig_path, sample


def test_gen_map_verify_flow(files):
    tmp, aig_path, sample = files
    sg = tmp / "tiny.sg"
    code, out = run("gen", "--liberty", "tiny", "--k", "3", "--level", "2", "--root-limit", "2",
                    "--out", str(sg))
    assert code == 0 and "#kv cmd=gen" in out
    lib = read_library(sg, read_liberty(bundled_liberty("tiny")))
    assert lib.count > 0
    for circuit in (aig_path, sample):
        net = tmp / "out.gnl"
        code, out = run("map", "--liberty", "tiny", "--sglib", str(sg), "--aig", str(circuit),
                        "--out", str(net))
        assert code == 0 and out.startswith("area=")
        code, out = run("verify", "--liberty", "tiny", "--aig", str(circuit), "--netlist", str(net))
        assert code == 0 and out.startswith("PASS")


def test_verify_catches_inverted_output(files):
    tmp, aig_path, _ = files
    sg = tmp / "tiny.sg"
    run("gen", "--liberty", "tiny", "--k", "3", "--root-limit", "2", "--out", str(sg))
    net = tmp / "out.gnl"
    run("map", "--liberty", "tiny", "--sglib", str(sg), "--aig", str(aig_path), "--out", str(net))
    lines = net.read_text().splitlines()
    i = next(i for i, l in enumerate(lines) if l.startswith("output po0 "))
    drv = lines[i].split()[2]
    lines[i] = "output po0 flipped"
    lines.append(f"instX INV flipped {drv}")
    net.write_text("\n".join(lines) + "\n")
    results = [run("verify", "--liberty", "tiny", "--aig", str(aig_path), "--netlist", str(net))
               for _ in range(2)]
    stable = [(c, [l for l in o.splitlines() if "elapsed=" not in l]) for c, o in results]
    assert stable[0] == stable[1]
    code, out = results[0]
    assert code == cli.EXIT_VERIFY and "FAIL" in out and "output=0" in out


def test_verilog_output(files):
    tmp, aig_path, _ = files
    sg = tmp / "tiny.sg"
    run("gen", "--liberty", "tiny", "--k", "3", "--root-limit", "2", "--out", str(sg))
    v = tmp / "out.v"
    code, _ = run("map", "--liberty", "tiny", "--sglib", str(sg), "--aig", str(aig_path),
                  "--out", str(v), "--format", "verilog")
    assert code == 0 and v.read_text().startswith("module c (")
    code, _ = run("verify", "--liberty", "tiny", "--aig", str(aig_path), "--netlist", str(v))
    assert code == 0


def test_gen_is_deterministic_across_workers(tmp_path):
    texts = []
    for n in ("1", "4"):
        p = tmp_path / f"w{n}.sg"
        run("gen", "--liberty", "tiny", "--k", "3", "--root-limit", "2", "--workers", n, "--out", str(p))
        texts.append(p.read_text())
    assert texts[0] == texts[1]


def test_level_one_library(tmp_path):
    p = tmp_path / "l1.sg"
    run("gen", "--liberty", "tiny", "--k", "3", "--level", "1", "--root-limit", "2", "--out", str(p))
    lib = read_library(p, read_liberty(bundled_liberty("tiny")))
    assert all(len(g.cells()) == 1 for g in lib.finals())


def test_estimate():
    code, out = run("estimate", "--liberty", "tiny", "--k", "3", "--level", "2", "--root-limit", "2")
    assert code == 0 and "#kv cmd=estimate depth=2 size=903" in out
    code, out = run("estimate", "--liberty", "tiny", "--k", "6", "--level", "0")
    assert "depth=0 size=6" in out


def test_bench_single_worker():
    code, out = run("bench", "--liberty", "tiny", "--k", "3", "--root-limit", "2",
                    "--workers-list", "1", "--reps", "2")
    assert code == 0
    assert "speedup=1.0000" in out


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("SGMAP_K", "2")
    monkeypatch.setenv("SGMAP_ROOT_LIMIT", "2")
    p = tmp_path / "e.sg"
    run("gen", "--liberty", "tiny", "--out", str(p))
    assert p.read_text().startswith("SGLIB v1 k=2 ")
    run("gen", "--liberty", "tiny", "--k", "3", "--out", str(p))
    assert p.read_text().startswith("SGLIB v1 k=3 ")


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.lib"
    bad.write_text("library (x) { cell (A) {")
    assert run("estimate", "--liberty", str(bad))[0] == cli.EXIT_PARSE
    bad_aig = tmp_path / "bad.aag"
    bad_aig.write_text("aag 1 1 1 0 0\n")
    sg = tmp_path / "t.sg"
    run("gen", "--liberty", "tiny", "--k", "2", "--root-limit", "2", "--out", str(sg))
    assert run("map", "--liberty", "tiny", "--sglib", str(sg), "--aig", str(bad_aig))[0] == cli.EXIT_PARSE
    only_inv = tmp_path / "inv.lib"
    only_inv.write_text('library (i) { cell (INV) { area : 1; pin (A) { direction : input; } '
                        'pin (Y) { direction : output; function : "!A"; } } }')
    sg2 = tmp_path / "inv.sg"
    run("gen", "--liberty", str(only_inv), "--k", "1", "--root-limit", "1", "--level", "1",
        "--out", str(sg2))
    good_aig = tmp_path / "g.aag"
    good_aig.write_text(write_aag(sample_aig()))
    assert run("map", "--liberty", str(only_inv), "--sglib", str(sg2),
               "--aig", str(good_aig))[0] == cli.EXIT_MAPPING
    with pytest.raises(SystemExit) as info:
        run("map")
    assert info.value.code == 2
