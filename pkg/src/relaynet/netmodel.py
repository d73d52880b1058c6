"""Network data model: parsing, cut enumeration, layering and time-unfolding.

Three network flavours share one JSON document format:

* ``DetNetwork``: linear finite-field deterministic channels with integer gains.
* ``GaussNetwork``: complex MIMO channel matrices between multi-antenna nodes.
* ``FunctionalNetwork``: general deterministic channels given as lookup tables.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import ArgumentError, NetworkParseError, ResourceLimitError
from .gf2_linalg import BitMatrix, block_matrix, shift_matrix

DEFAULT_NODE_CAP = 24


@dataclass(frozen=True)
class DetNetwork:
    nodes: tuple[str, ...]
    source: str
    destinations: tuple[str, ...]
    gains: Mapping[tuple[str, str], int]
    q: int

    @property
    def destination(self) -> str:
        return self.destinations[0]

    def in_neighbors(self, v: str) -> list[str]:
        return [i for i in self.nodes if (i, v) in self.gains]

    def out_neighbors(self, v: str) -> list[str]:
        return [j for j in self.nodes if (v, j) in self.gains]

    def edges(self) -> list[tuple[str, str]]:
        return list(self.gains)


@dataclass(frozen=True)
class GaussNetwork:
    nodes: tuple[str, ...]
    source: str
    destinations: tuple[str, ...]
    channels: Mapping[tuple[str, str], np.ndarray]
    tx_antennas: Mapping[str, int]
    rx_antennas: Mapping[str, int]
    convention: str = "complex"
    power: float = 1.0

    @property
    def destination(self) -> str:
        return self.destinations[0]

    @property
    def rate_factor(self) -> float:
        return 0.5 if self.convention == "real" else 1.0

    def edges(self) -> list[tuple[str, str]]:
        return list(self.channels)

    def with_channels(self, channels: Mapping[tuple[str, str], np.ndarray]) -> "GaussNetwork":
        return GaussNetwork(
            self.nodes, self.source, self.destinations, dict(channels),
            self.tx_antennas, self.rx_antennas, self.convention, self.power,
        )

    def is_single_antenna(self) -> bool:
        return all(self.tx_antennas[v] == 1 and self.rx_antennas[v] == 1 for v in self.nodes)


@dataclass(frozen=True)
class FunctionalNetwork:
    """Deterministic network whose received symbols are table lookups.

    ``functions[j] = (inputs, table)``: the symbol received at ``j`` is
    ``table[index]`` where ``index`` is the mixed-radix encoding of the
    transmitted symbols of ``inputs`` (first input most significant).
    """

    nodes: tuple[str, ...]
    source: str
    destinations: tuple[str, ...]
    alphabets: Mapping[str, int]
    functions: Mapping[str, tuple[tuple[str, ...], tuple[int, ...]]]

    @property
    def destination(self) -> str:
        return self.destinations[0]

    def edges(self) -> list[tuple[str, str]]:
        return [(i, j) for j, (inputs, _) in self.functions.items() for i in inputs]


@dataclass(frozen=True)
class Cut:
    source_side: frozenset
    complement: frozenset

    def crossing_edges(self, net) -> list[tuple[str, str]]:
        return [(i, j) for (i, j) in net.edges() if i in self.source_side and j in self.complement]

    def label(self, nodes) -> str:
        return "{" + ",".join(v for v in nodes if v in self.source_side) + "}"


# --------------------------------------------------------------------------
# parsing

_TOP_FIELDS = {"model", "snr_convention", "nodes", "source", "destinations", "edges", "power", "tables"}
_NODE_FIELDS = {"id", "tx_antennas", "rx_antennas"}
_EDGE_FIELDS = {"from", "to", "gain", "H"}
_TABLE_FIELDS = {"alphabets", "functions"}
_FUNCTION_FIELDS = {"inputs", "table"}


def _require(cond, loc, msg):
    if not cond:
        raise NetworkParseError(loc, msg)


def _check_fields(obj, allowed, loc):
    _require(isinstance(obj, dict), loc, "expected an object")
    extra = sorted(set(obj) - allowed)
    _require(not extra, loc, f"unknown field(s) {extra}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_network(text: str | bytes | dict):
    """Parse and validate a network document.

    Returns a ``DetNetwork``, ``GaussNetwork`` or ``FunctionalNetwork``.
    Raises ``NetworkParseError`` with a location pointer on any violation.
    """
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetworkParseError(f"line {exc.lineno} col {exc.colno}", exc.msg) from None
    _check_fields(doc, _TOP_FIELDS, "$")
    for key in ("model", "nodes", "source", "destinations", "edges"):
        _require(key in doc, "$", f"missing field '{key}'")
    model = doc["model"]
    _require(model in ("det", "gauss"), "$.model", f"unknown model {model!r}")

    _require(isinstance(doc["nodes"], list), "$.nodes", "expected a list")
    nodes: list[str] = []
    tx: dict[str, int] = {}
    rx: dict[str, int] = {}
    for k, nd in enumerate(doc["nodes"]):
        loc = f"$.nodes[{k}]"
        _check_fields(nd, _NODE_FIELDS, loc)
        _require("id" in nd and isinstance(nd["id"], str) and nd["id"], loc, "node needs a string id")
        vid = nd["id"]
        _require(vid not in tx, loc, f"duplicate node id {vid!r}")
        for fld in ("tx_antennas", "rx_antennas"):
            val = nd.get(fld, 1)
            _require(_is_int(val) and val >= 1, f"{loc}.{fld}", "antenna count must be a positive integer")
        nodes.append(vid)
        tx[vid] = nd.get("tx_antennas", 1)
        rx[vid] = nd.get("rx_antennas", 1)
    known = set(nodes)

    src = doc["source"]
    _require(src in known, "$.source", f"unknown node {src!r}")
    dests = doc["destinations"]
    _require(isinstance(dests, list) and dests, "$.destinations", "expected a non-empty list")
    for k, d in enumerate(dests):
        _require(d in known, f"$.destinations[{k}]", f"unknown node {d!r}")
        _require(d != src, f"$.destinations[{k}]", "destination equals source")
    _require(len(set(dests)) == len(dests), "$.destinations", "duplicate destination")

    if model == "det":
        _require("snr_convention" not in doc, "$.snr_convention", "only valid for gauss models")
        _require("power" not in doc, "$.power", "only valid for gauss models")
    else:
        _require("tables" not in doc, "$.tables", "only valid for det models")

    _require(isinstance(doc["edges"], list), "$.edges", "expected a list")
    seen = set()
    raw_edges = []
    for k, e in enumerate(doc["edges"]):
        loc = f"$.edges[{k}]"
        _check_fields(e, _EDGE_FIELDS, loc)
        for end in ("from", "to"):
            _require(end in e, loc, f"missing field '{end}'")
            _require(e[end] in known, f"{loc}.{end}", f"unknown node {e[end]!r}")
        i, j = e["from"], e["to"]
        _require(i != j, loc, "self-loop edges are not allowed")
        _require((i, j) not in seen, loc, f"duplicate edge {i}->{j}")
        seen.add((i, j))
        raw_edges.append((loc, i, j, e))

    if "tables" in doc:
        return _parse_functional(doc, nodes, src, dests, raw_edges)

    if model == "det":
        gains: dict[tuple[str, str], int] = {}
        for loc, i, j, e in raw_edges:
            _require("H" not in e, f"{loc}.H", "det edges take an integer 'gain'")
            _require("gain" in e, loc, "missing field 'gain'")
            g = e["gain"]
            _require(_is_int(g), f"{loc}.gain", "gain must be an integer")
            _require(g >= 0, f"{loc}.gain", "gain must be non-negative")
            if g > 0:
                gains[(i, j)] = g
        q = max(gains.values(), default=0)
        return DetNetwork(tuple(nodes), src, tuple(dests), gains, q)

    conv = doc.get("snr_convention", "complex")
    _require(conv in ("real", "complex"), "$.snr_convention", f"unknown convention {conv!r}")
    power = doc.get("power", 1.0)
    _require(isinstance(power, (int, float)) and not isinstance(power, bool) and power > 0,
             "$.power", "power must be a positive number")
    channels: dict[tuple[str, str], np.ndarray] = {}
    for loc, i, j, e in raw_edges:
        _require("gain" not in e, f"{loc}.gain", "gauss edges take a matrix 'H'")
        _require("H" in e, loc, "missing field 'H'")
        channels[(i, j)] = _parse_matrix(e["H"], rx[j], tx[i], f"{loc}.H")
    return GaussNetwork(tuple(nodes), src, tuple(dests), channels, tx, rx, conv, float(power))


def _parse_matrix(raw, nrows, ncols, loc) -> np.ndarray:
    _require(isinstance(raw, list) and len(raw) == nrows, loc, f"expected {nrows} rows")
    out = np.zeros((nrows, ncols), dtype=complex)
    for r, row in enumerate(raw):
        _require(isinstance(row, list) and len(row) == ncols, f"{loc}[{r}]", f"expected {ncols} entries")
        for c, z in enumerate(row):
            zl = f"{loc}[{r}][{c}]"
            _require(isinstance(z, list) and len(z) == 2, zl, "entry must be [re, im]")
            _require(all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z), zl,
                     "entry parts must be numbers")
            _require(all(np.isfinite(t) for t in z), zl, "entry must be finite")
            out[r, c] = complex(z[0], z[1])
    return out


def _parse_functional(doc, nodes, src, dests, raw_edges) -> FunctionalNetwork:
    tables = doc["tables"]
    _check_fields(tables, _TABLE_FIELDS, "$.tables")
    _require("alphabets" in tables and "functions" in tables, "$.tables", "needs 'alphabets' and 'functions'")
    _require(not raw_edges, "$.edges", "functional networks derive edges from 'tables.functions'")
    alph = tables["alphabets"]
    _require(isinstance(alph, dict), "$.tables.alphabets", "expected an object")
    alphabets = {}
    for v in nodes:
        a = alph.get(v, 1)
        _require(_is_int(a) and a >= 1, f"$.tables.alphabets.{v}", "alphabet size must be a positive integer")
        alphabets[v] = a
    for v in alph:
        _require(v in alphabets, f"$.tables.alphabets.{v}", "unknown node")
    funcs = tables["functions"]
    _require(isinstance(funcs, dict), "$.tables.functions", "expected an object")
    functions = {}
    for j, spec_ in funcs.items():
        loc = f"$.tables.functions.{j}"
        _require(j in alphabets, loc, "unknown node")
        _check_fields(spec_, _FUNCTION_FIELDS, loc)
        inputs = spec_.get("inputs")
        _require(isinstance(inputs, list) and inputs, f"{loc}.inputs", "expected a non-empty list")
        for k, i in enumerate(inputs):
            _require(i in alphabets, f"{loc}.inputs[{k}]", f"unknown node {i!r}")
            _require(i != j, f"{loc}.inputs[{k}]", "self-loop edges are not allowed")
        _require(len(set(inputs)) == len(inputs), f"{loc}.inputs", "duplicate input")
        table = spec_.get("table")
        _require(isinstance(table, list), f"{loc}.table", "expected a list")
        functions[j] = (tuple(inputs), tuple(table))
    return FunctionalNetwork(tuple(nodes), src, tuple(dests), alphabets, functions)


def load_network(path):
    with open(path, "rb") as fh:
        return parse_network(fh.read())


def det_network(edges: Mapping[tuple[str, str], int], source="S", destinations=("D",), nodes=None) -> DetNetwork:
    """Build a ``DetNetwork`` directly from a gain mapping (zero gains dropped)."""
    if nodes is None:
        order = [source]
        for i, j in edges:
            for v in (i, j):
                if v not in order and v not in destinations:
                    order.append(v)
        order += [d for d in destinations if d not in order]
        nodes = order
    gains = {}
    for (i, j), g in edges.items():
        if i == j:
            raise ArgumentError("self-loop edges are not allowed")
        if g < 0:
            raise ArgumentError(f"negative gain on {i}->{j}")
        if i not in nodes or j not in nodes:
            raise ArgumentError(f"edge {i}->{j} references an unknown node")
        if g > 0:
            gains[(i, j)] = int(g)
    return DetNetwork(tuple(nodes), source, tuple(destinations), gains, max(gains.values(), default=0))


def gauss_network(channels, source="S", destinations=("D",), nodes=None, convention="complex",
                  tx_antennas=None, rx_antennas=None, power=1.0) -> GaussNetwork:
    """Build a ``GaussNetwork`` from a mapping of edges to scalars or matrices."""
    if nodes is None:
        order = [source]
        for i, j in channels:
            for v in (i, j):
                if v not in order and v not in destinations:
                    order.append(v)
        order += [d for d in destinations if d not in order]
        nodes = order
    mats = {}
    for (i, j), h in channels.items():
        if i == j:
            raise ArgumentError("self-loop edges are not allowed")
        mats[(i, j)] = np.atleast_2d(np.asarray(h, dtype=complex))
    tx = dict(tx_antennas or {})
    rx = dict(rx_antennas or {})
    for v in nodes:
        tx.setdefault(v, 1)
        rx.setdefault(v, 1)
    for (i, j), m in mats.items():
        if m.shape != (rx[j], tx[i]):
            raise ArgumentError(f"channel {i}->{j} has shape {m.shape}, expected {(rx[j], tx[i])}")
    if convention not in ("real", "complex"):
        raise ArgumentError(f"unknown convention {convention!r}")
    return GaussNetwork(tuple(nodes), source, tuple(destinations), mats, tx, rx, convention, float(power))


# --------------------------------------------------------------------------
# cuts


def cut_count(net, dest=None) -> int:
    return 2 ** (len(net.nodes) - 2)


def enumerate_cuts(net, dest: str | None = None, cap: int = DEFAULT_NODE_CAP) -> Iterator[Cut]:
    """All source/``dest`` separating cuts in increasing subset-encoding order.

    Node ``k`` of ``net.nodes`` maps to bit ``k``; the source bit is always set
    and the destination bit always clear.
    """
    dest = net.destination if dest is None else dest
    if dest not in net.nodes or dest == net.source:
        raise ArgumentError(f"invalid destination {dest!r}")
    if len(net.nodes) > cap:
        raise ResourceLimitError(
            f"{len(net.nodes)} nodes exceeds the cut-enumeration cap of {cap}; raise it with --node-cap"
        )
    return _cut_iter(net.nodes, net.source, dest)


def _cut_iter(nodes, source, dest) -> Iterator[Cut]:
    free = [v for v in nodes if v not in (source, dest)]
    everything = frozenset(nodes)
    for mask in range(1 << len(free)):
        source_side = frozenset([source] + [v for k, v in enumerate(free) if mask >> k & 1])
        yield Cut(source_side, everything - source_side)


def cut_transfer_matrix(net: DetNetwork, cut: Cut) -> BitMatrix:
    """Stacked shift blocks from all inputs in the cut to all outputs outside it."""
    q = net.q
    senders = [v for v in net.nodes if v in cut.source_side]
    receivers = [v for v in net.nodes if v in cut.complement]
    grid = [
        [shift_matrix(q, net.gains[(i, j)]) if (i, j) in net.gains else None for i in senders]
        for j in receivers
    ]
    return block_matrix(grid, [q] * len(receivers), [q] * len(senders))


def transfer_matrix(net: DetNetwork, senders, receivers) -> BitMatrix:
    """Transfer matrix between arbitrary ordered sender and receiver lists."""
    q = net.q
    grid = [
        [shift_matrix(q, net.gains[(i, j)]) if (i, j) in net.gains else None for i in senders]
        for j in receivers
    ]
    return block_matrix(grid, [q] * len(receivers), [q] * len(senders))


def cut_channel_matrix(net: GaussNetwork, cut: Cut) -> np.ndarray:
    """Complex MIMO matrix from all transmit antennas in the cut to receive antennas outside."""
    senders = [v for v in net.nodes if v in cut.source_side]
    receivers = [v for v in net.nodes if v in cut.complement]
    m = sum(net.tx_antennas[v] for v in senders)
    n = sum(net.rx_antennas[v] for v in receivers)
    g = np.zeros((n, m), dtype=complex)
    r0 = 0
    for j in receivers:
        c0 = 0
        for i in senders:
            h = net.channels.get((i, j))
            if h is not None:
                g[r0:r0 + net.rx_antennas[j], c0:c0 + net.tx_antennas[i]] = h
            c0 += net.tx_antennas[i]
        r0 += net.rx_antennas[j]
    return g


# --------------------------------------------------------------------------
# layering


def _relevant_nodes(net) -> set:
    succ: dict[str, list[str]] = {v: [] for v in net.nodes}
    pred: dict[str, list[str]] = {v: [] for v in net.nodes}
    for i, j in net.edges():
        succ[i].append(j)
        pred[j].append(i)

    def reach(start, adj):
        seen = set(start)
        todo = deque(start)
        while todo:
            u = todo.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    return reach([net.source], succ) & reach(list(net.destinations), pred)


def is_layered(net) -> tuple[bool, dict[str, int] | None]:
    """Check whether all source-to-destination paths have consistent depths.

    Only nodes lying on some source-to-destination path are constrained.
    Returns ``(True, layers)`` with a depth for each such node, or
    ``(False, None)``.
    """
    relevant = _relevant_nodes(net)
    if not relevant:
        return True, {net.source: 0}
    depth = {net.source: 0}
    todo = deque([net.source])
    edges = [(i, j) for i, j in net.edges() if i in relevant and j in relevant]
    succ: dict[str, list[str]] = {}
    for i, j in edges:
        succ.setdefault(i, []).append(j)
    while todo:
        u = todo.popleft()
        for w in succ.get(u, ()):
            if w not in depth:
                depth[w] = depth[u] + 1
                todo.append(w)
    for i, j in edges:
        if depth[j] != depth[i] + 1:
            return False, None
    return True, {v: depth[v] for v in net.nodes if v in depth}


# --------------------------------------------------------------------------
# unfolding


def stage_name(v: str, i: int) -> str:
    return f"{v}[{i}]"


@dataclass(frozen=True)
class UnfoldedNetwork:
    """Time-unfolded copy of a deterministic network.

    Stage 0 holds only the source and stage ``K+1`` only the destination.
    Channel copies run ``v[i] -> w[i+1]`` for ``1 <= i < K`` and, from the
    last relay stage, into the final destination copy. Wired memory links
    ``v[i] -> v[i+1]`` carry ``K * cbar`` capacity units.
    """

    base: DetNetwork
    K: int
    cbar: float
    stages: tuple[tuple[str, ...], ...]
    det_edges: Mapping[tuple[str, str], int]
    wired_edges: Mapping[tuple[str, str], float]
    dest: str = ""

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(v for stage in self.stages for v in stage)

    @property
    def source(self) -> str:
        return self.stages[0][0]

    @property
    def destination(self) -> str:
        return self.stages[-1][0]

    def as_det_network(self) -> DetNetwork:
        """The channel part alone (wired links omitted), with the base ``q``."""
        return DetNetwork(self.nodes, self.source, (self.destination,), dict(self.det_edges), self.base.q)

    def edges(self) -> list[tuple[str, str]]:
        return list(self.det_edges) + list(self.wired_edges)

    def cut_value(self, source_side) -> float:
        """Crossing wired capacity plus rank of the crossing channel blocks."""
        from .gf2_linalg import rank

        source_side = frozenset(source_side)
        cut = Cut(source_side, frozenset(self.nodes) - source_side)
        wired = sum(c for (a, b), c in self.wired_edges.items() if a in source_side and b not in source_side)
        return wired + rank(cut_transfer_matrix(self.as_det_network(), cut))


def unfold(net: DetNetwork, K: int, cbar: float, dest: str | None = None) -> UnfoldedNetwork:
    if K < 1:
        raise ArgumentError("K must be at least 1")
    if cbar < 0:
        raise ArgumentError("cbar must be non-negative")
    dest = net.destination if dest is None else dest
    src = net.source
    wired_cap = K * cbar
    stages = [(stage_name(src, 0),)]
    for i in range(1, K + 1):
        stages.append(tuple(stage_name(v, i) for v in net.nodes))
    stages.append((stage_name(dest, K + 1),))

    det_edges: dict[tuple[str, str], int] = {}
    for i in range(1, K):
        for (a, b), g in net.gains.items():
            det_edges[(stage_name(a, i), stage_name(b, i + 1))] = g
    for (a, b), g in net.gains.items():
        if b == dest:
            det_edges[(stage_name(a, K), stage_name(dest, K + 1))] = g

    wired: dict[tuple[str, str], float] = {
        (stage_name(src, 0), stage_name(src, 1)): wired_cap,
        (stage_name(dest, K), stage_name(dest, K + 1)): wired_cap,
    }
    for i in range(1, K):
        for v in net.nodes:
            wired[(stage_name(v, i), stage_name(v, i + 1))] = wired_cap
    return UnfoldedNetwork(net, K, float(cbar), tuple(stages), det_edges, wired, dest)
