import pytest

from sgmap.aig import random_aig
from sgmap.liberty import CellLibrary, make_cell
from sgmap.mapper import MapParams, map_aig
from sgmap.netlist import (Instance, Netlist, NetlistError, parse_gnl, parse_verilog, report,
                           simulate_netlist, write_gnl, write_verilog)

INV = make_cell("INV", ["A"], "!A", 1.0, [1.0])
AND2 = make_cell("AND2", ["A", "B"], "A&B", 2.0, [1.0, 1.5])


def test_inverter_only():
    n = Netlist("t", ["a"], [("y", "w")], [Instance("i0", INV, ("a",), "w", True)])
    assert simulate_netlist(n, [0xAAAAAAAAAAAAAAAA]) == [0x5555555555555555]
    rep = report(n)
    assert (rep.area, rep.delay, rep.gates, rep.nets, rep.inverters) == (1.0, 1.0, 1, 2, 1)


def test_single_and_report():
    n = Netlist("t", ["a", "b"], [("y", "w")], [Instance("i0", AND2, ("a", "b"), "w")])
    assert simulate_netlist(n, [0xAAAA, 0xCCCC]) == [0x8888]
    assert (report(n).area, report(n).delay) == (2.0, 1.5)


def test_constants_and_passthrough():
    n = Netlist("t", ["a"], [("y0", "1'b1"), ("y1", "a")])
    assert simulate_netlist(n, [5]) == [2 ** 64 - 1, 5]
    assert (report(n).area, report(n).delay) == (0.0, 0.0)


def test_structural_errors():
    cyc = Netlist("t", ["a"], [("y", "w1")], [Instance("i0", AND2, ("a", "w2"), "w1"),
                                           Instance("i1", INV, ("w1",), "w2")])
    with pytest.raises(NetlistError, match="cycle"):
        simulate_netlist(cyc, [0])
    undriven = Netlist("t", ["a"], [("y", "w")], [Instance("i0", INV, ("zz",), "w")])
    with pytest.raises(NetlistError):
        report(undriven)
    double = Netlist("t", ["a"], [("y", "w")], [Instance("i0", INV, ("a",), "w"),
                                             Instance("i1", INV, ("a",), "w")])
    with pytest.raises(NetlistError):
        report(double)
    with pytest.raises(NetlistError):
        report(Netlist("t", ["a"], [("y", "nothing")]))


def test_text_formats_round_trip():
    cells = CellLibrary([INV, AND2, make_cell("OR2", ["A", "B"], "A|B", 2.0)])
    from sgmap.sglib import GenParams, generate_library
    sg, _ = generate_library(cells, GenParams(k=3, max_level=2, root_input_limit=2))
    a = random_aig(6, 90, 5, seed=2)
    net = map_aig(a, sg, MapParams(cut_size=3), cells).netlist
    words = list(range(1, 7))
    want = simulate_netlist(net, words)
    gnl = write_gnl(net)
    assert gnl.splitlines()[1].startswith("input pi1")
    inst_lines = [l for l in gnl.splitlines() if l.startswith("inst")]
    assert len(inst_lines) == len(net.instances)
    back = parse_gnl(gnl, cells)
    assert write_gnl(back) == gnl and simulate_netlist(back, words) == want
    v = write_verilog(net)
    assert v.startswith("module top (") and v.rstrip().endswith("endmodule")
    back = parse_verilog(v, cells)
    assert simulate_netlist(back, words) == want
    assert report(back).area == report(net).area


def test_parse_gnl_errors():
    cells = CellLibrary([INV])
    with pytest.raises(NetlistError, match="unknown cell"):
        parse_gnl("input a\ninst0 NAND y a a\n", cells)
    with pytest.raises(NetlistError, match="takes 1"):
        parse_gnl("input a\ninst0 INV y a a\n", cells)
    with pytest.raises(NetlistError):
        parse_gnl("garbage\n", cells)
