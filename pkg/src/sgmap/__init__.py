"""Supergate library generation and cut-based technology mapping for AIGs."""

from importlib.resources import files

from .aig import Aig, parse_aiger, random_aig, read_aiger, simulate_aig
from .cuts import Cut, enumerate_cuts
from .liberty import CellLibrary, StandardCell, make_cell, parse_liberty, read_liberty
from .mapper import MapParams, MappingError, map_aig
from .netlist import Netlist, report, simulate_netlist
from .sglib import (GenParams, SupergateLibrary, estimate_candidate_count, generate_library,
                    read_library, serialize_library, write_library)

__version__ = "0.1.0"


def bundled_liberty(name: str) -> str:
    """Path of a Liberty file shipped with the package (``tiny`` or ``demo``)."""
    return str(files(__package__) / "data" / f"{name}.lib")
