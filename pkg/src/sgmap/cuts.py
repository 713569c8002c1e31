"""k-feasible cut enumeration with per-cut truth tables.

Each node's cut set holds its trivial cut plus up to ``cuts_per_node``
non-trivial cuts, built bottom-up by pairwise union of the fanin cut sets.
Unions wider than ``k`` and cuts dominated by a subset are dropped; the
survivors are ranked by (leaf count, leaves) before truncation.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import tt
from .aig import Aig, lit_id

DEFAULT_CUT_SIZE = 6
DEFAULT_CUTS_PER_NODE = 24


class UnsupportedWidthError(ValueError):
    pass


@dataclass
class Cut:
    root: int
    leaves: Tuple[int, ...]
    table: int = 0
    arrival: float = 0.0
    area_flow: float = 0.0

    @property
    def size(self) -> int:
        return len(self.leaves)

    @property
    def is_trivial(self) -> bool:
        return self.leaves == (self.root,)

    def __repr__(self):
        return f"Cut({self.root}: {{{','.join(map(str, self.leaves))}}} tt={tt.to_hex(self.table)})"


@dataclass
class CutSet:
    owner: int
    cuts: List[Cut]

    def leaf_sets(self) -> List[Tuple[int, ...]]:
        return [c.leaves for c in self.cuts]

    def __iter__(self):
        return iter(self.cuts)

    def __len__(self):
        return len(self.cuts)


def _mask(leaves: Iterable[int]) -> int:
    m = 0
    for leaf in leaves:
        m |= 1 << leaf
    return m


def filter_dominated(leaf_sets: Iterable[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """Drop duplicates and every set that contains another set of the input."""
    kept: List[Tuple[int, int, Tuple[int, ...]]] = []
    for leaves in sorted(set(leaf_sets), key=lambda s: (len(s), s)):
        m = _mask(leaves)
        if any(km & m == km for _, km, _ in kept):
            continue
        kept.append((len(leaves), m, leaves))
    return [leaves for _, _, leaves in kept]


def merge_cut_sets(a: Sequence, b: Sequence, k: int, root: int = -1) -> List[Cut]:
    """Pairwise unions of two cut sets that fit in ``k`` leaves, dominance-filtered.

    ``a`` and ``b`` may hold :class:`Cut` objects or plain leaf tuples.
    """
    if k > tt.MAX_VARS:
        raise UnsupportedWidthError(f"cut size {k} exceeds {tt.MAX_VARS}")
    left = [c.leaves if isinstance(c, Cut) else tuple(c) for c in a]
    right = [c.leaves if isinstance(c, Cut) else tuple(c) for c in b]
    unions = set()
    for u in left:
        su = set(u)
        for v in right:
            w = su.union(v)
            if len(w) <= k:
                unions.add(tuple(sorted(w)))
    return [Cut(root, leaves) for leaves in filter_dominated(unions)]


def cut_function(a: Aig, c: Cut) -> int:
    """Truth table of ``c.root`` over the sorted leaves of ``c``."""
    if len(c.leaves) > tt.MAX_VARS:
        raise UnsupportedWidthError(f"cut with {len(c.leaves)} leaves exceeds {tt.MAX_VARS}")
    words: Dict[int, int] = {leaf: tt.ELEMENTARY[i] for i, leaf in enumerate(c.leaves)}
    words.setdefault(0, tt.CONST0)
    stack = [c.root]
    while stack:
        node = stack[-1]
        if node in words:
            stack.pop()
            continue
        if not a.is_and(node):
            raise ValueError(f"{c.leaves} is not a cut of node {c.root}: reached input {node}")
        l0, l1 = a.fanins(node)
        n0, n1 = l0 >> 1, l1 >> 1
        if n0 in words and n1 in words:
            w0 = words[n0] ^ (tt.MASK if l0 & 1 else 0)
            w1 = words[n1] ^ (tt.MASK if l1 & 1 else 0)
            words[node] = w0 & w1
            stack.pop()
        else:
            if n0 not in words:
                stack.append(n0)
            if n1 not in words:
                stack.append(n1)
    return words[c.root]


def enumerate_cuts(a: Aig, k: int = DEFAULT_CUT_SIZE,
                   cuts_per_node: Optional[int] = DEFAULT_CUTS_PER_NODE,
                   with_tables: bool = True) -> List[CutSet]:
    """Cut set for every node id; ``cuts_per_node=None`` means unlimited.

    The limit counts non-trivial cuts only; the trivial cut is always kept.
    """
    if not 1 <= k <= tt.MAX_VARS:
        raise UnsupportedWidthError(f"cut size {k} outside 1..{tt.MAX_VARS}")
    if cuts_per_node is not None and cuts_per_node < 1:
        raise ValueError("cuts_per_node must be at least 1")
    sets: List[CutSet] = [CutSet(0, [Cut(0, (), tt.CONST0)])]
    for node in range(1, a.num_pis + 1):
        sets.append(CutSet(node, [Cut(node, (node,), tt.ELEMENTARY[0])]))
    for node in a.and_ids():
        l0, l1 = a.fanins(node)
        merged = merge_cut_sets(sets[lit_id(l0)].cuts, sets[lit_id(l1)].cuts, k, node)
        if cuts_per_node is not None:
            merged = merged[:cuts_per_node]
        if with_tables:
            for c in merged:
                c.table = cut_function(a, c)
        sets.append(CutSet(node, [Cut(node, (node,), tt.ELEMENTARY[0])] + merged))
    return sets


def dump_cuts(sets: Sequence[CutSet]) -> str:
    lines = []
    for cs in sets:
        for c in cs.cuts:
            lines.append(f"node {cs.owner}: {{{','.join(map(str, c.leaves))}}} tt={tt.to_hex(c.table)}")
    return "\n".join(lines) + "\n"
