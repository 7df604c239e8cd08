"""Road network ingestion, site snapping, and origin-destination matrices.

Road files are delimited text with two sections.  The node section opens
with the header ``node_id,x,y`` for projected metre coordinates or
``node_id,lon,lat`` for geographic degrees; geographic inputs are converted
with an equirectangular projection about the road-network centroid.  The
edge section opens with a header whose first field is ``edge`` and each edge
row is ``edge,<node_a>,<node_b>[,<length_m>][,<resolution>]``; a missing
length falls back to the Euclidean node distance and a missing resolution
takes the loader default.

Distances are computed in float metres along the network and rounded
half-up to integer metres only when a matrix is emitted.  Unreachable pairs
carry the sentinel -1 and are surfaced in the coverage report, never
silently dropped.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

#: Sentinel distance for unreachable origin-destination pairs.
UNREACHABLE = -1

EARTH_RADIUS_M = 6_371_000.0

#: Coarse nodes at most this far from a fine node are unified into it.
DEFAULT_MERGE_TOLERANCE_M = 250.0


class RoadFileError(ValueError):
    """Malformed road or site file; message includes the offending line."""


def natural_key(ident: str) -> tuple:
    """Sort key splitting digit runs so e.g. n2 sorts before n10."""
    parts = re.split(r"(\d+)", str(ident))
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


@dataclass(frozen=True, slots=True)
class Site:
    """A located facility (village or trader) to be snapped onto the roads."""

    id: str
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class SiteSnap:
    site_id: str
    node: str
    offset_m: float


@dataclass(frozen=True, slots=True)
class RoadEdge:
    a: str
    b: str
    length_m: float
    resolution: str = "fine"


@dataclass(frozen=True)
class Projection:
    """Equirectangular lon/lat -> metre projection about a fixed origin."""

    lon0: float
    lat0: float

    def to_xy(self, lon: float, lat: float) -> tuple[float, float]:
        k = math.pi / 180.0
        x = EARTH_RADIUS_M * math.cos(self.lat0 * k) * (lon - self.lon0) * k
        y = EARTH_RADIUS_M * (lat - self.lat0) * k
        return x, y


@dataclass(frozen=True)
class RoadGraph:
    """Undirected road network with deterministic node and edge order."""

    coords: dict[str, tuple[float, float]]
    edges: tuple[RoadEdge, ...]

    def __init__(self, coords: dict[str, tuple[float, float]], edges: Iterable[RoadEdge]) -> None:
        object.__setattr__(self, "coords", dict(coords))
        object.__setattr__(self, "edges", tuple(edges))
        self._validate()

    def _validate(self) -> None:
        seen_pairs = set()
        for i, e in enumerate(self.edges):
            if e.a not in self.coords or e.b not in self.coords:
                raise RoadFileError(f"edge {i}: unknown endpoint ({e.a!r}, {e.b!r})")
            if e.a == e.b:
                raise RoadFileError(f"edge {i}: self-loop at {e.a!r}")
            if not (e.length_m > 0 and math.isfinite(e.length_m)):
                raise RoadFileError(f"edge {i}: length must be positive, got {e.length_m}")
            key = (min(e.a, e.b), max(e.a, e.b), e.resolution)
            if key in seen_pairs:
                raise RoadFileError(f"edge {i}: duplicate undirected edge {key}")
            seen_pairs.add(key)
        for n, (x, y) in self.coords.items():
            if not (math.isfinite(x) and math.isfinite(y)):
                raise RoadFileError(f"node {n!r}: non-finite coordinates")

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self.coords)

    @cached_property
    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        adj: dict[str, list[tuple[str, float]]] = {n: [] for n in self.coords}
        for e in self.edges:
            adj[e.a].append((e.b, e.length_m))
            adj[e.b].append((e.a, e.length_m))
        return adj


def euclid(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


# -- parsing --------------------------------------------------------------------


def _split_sections(text: str, source: str) -> tuple[bool, list[list[str]], list[list[str]]]:
    """Return (is_geographic, node_rows, edge_rows)."""
    lines = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise RoadFileError(f"{source}: empty road file")
    header = [f.strip() for f in rows[0].split(",")]
    if header == ["node_id", "x", "y"]:
        geographic = False
    elif header == ["node_id", "lon", "lat"]:
        geographic = True
    else:
        raise RoadFileError(
            f"{source}: first line must be 'node_id,x,y' or 'node_id,lon,lat', got {rows[0]!r}"
        )
    node_rows: list[list[str]] = []
    edge_rows: list[list[str]] = []
    in_edges = False
    for lineno, ln in enumerate(rows[1:], start=2):
        fields = [f.strip() for f in ln.split(",")]
        if fields[0] == "edge":
            if not in_edges:
                in_edges = True
                if fields[1:3] == ["node_a", "node_b"]:
                    continue  # section header
            edge_rows.append(fields + [str(lineno)])
        elif in_edges:
            raise RoadFileError(f"{source} line {lineno}: node row after edge section")
        else:
            node_rows.append(fields + [str(lineno)])
    return geographic, node_rows, edge_rows


def _parse_road_text(
    text: str,
    source: str,
    default_resolution: str,
) -> tuple[bool, dict[str, tuple[float, float]], list[tuple[str, str, float | None, str]]]:
    geographic, node_rows, edge_rows = _split_sections(text, source)
    coords: dict[str, tuple[float, float]] = {}
    for fields in node_rows:
        lineno = fields[-1]
        if len(fields) != 4:
            raise RoadFileError(f"{source} line {lineno}: expected 'node_id,x,y'")
        node, xs, ys = fields[0], fields[1], fields[2]
        if node in coords:
            raise RoadFileError(f"{source} line {lineno}: duplicate node id {node!r}")
        try:
            coords[node] = (float(xs), float(ys))
        except ValueError:
            raise RoadFileError(f"{source} line {lineno}: bad coordinates {xs!r},{ys!r}") from None
    raw_edges: list[tuple[str, str, float | None, str]] = []
    for fields in edge_rows:
        lineno = fields[-1]
        body = fields[:-1]
        if len(body) < 3 or len(body) > 5:
            raise RoadFileError(f"{source} line {lineno}: expected 'edge,node_a,node_b[,length_m][,resolution]'")
        a, b = body[1], body[2]
        length: float | None = None
        resolution = default_resolution
        if len(body) >= 4 and body[3] != "":
            try:
                length = float(body[3])
            except ValueError:
                # a 4-field row may carry a resolution instead of a length
                if len(body) == 4:
                    resolution = body[3]
                else:
                    raise RoadFileError(f"{source} line {lineno}: bad length {body[3]!r}") from None
        if len(body) == 5 and body[4] != "":
            resolution = body[4]
        if a not in coords or b not in coords:
            raise RoadFileError(f"{source} line {lineno}: edge references unknown node ({a!r}, {b!r})")
        raw_edges.append((a, b, length, resolution))
    return geographic, coords, raw_edges


def load_road_graph(
    path: str | Path,
    default_resolution: str = "fine",
    projection: Projection | None = None,
) -> RoadGraph:
    """Load a single road file; see the module docstring for the format."""
    text = Path(path).read_text(encoding="utf-8")
    geographic, coords, raw_edges = _parse_road_text(text, str(path), default_resolution)
    if geographic:
        if projection is None:
            lon0 = sum(c[0] for c in coords.values()) / len(coords)
            lat0 = sum(c[1] for c in coords.values()) / len(coords)
            projection = Projection(lon0, lat0)
        coords = {n: projection.to_xy(lon, lat) for n, (lon, lat) in coords.items()}
    edges = []
    for a, b, length, resolution in raw_edges:
        if length is None:
            length = euclid(coords[a], coords[b])
        edges.append(RoadEdge(a, b, length, resolution))
    return RoadGraph(coords, edges)


def road_projection(path: str | Path) -> Projection | None:
    """Projection a geographic road file would use (None for projected files)."""
    text = Path(path).read_text(encoding="utf-8")
    geographic, coords, _ = _parse_road_text(text, str(path), "fine")
    if not geographic:
        return None
    lon0 = sum(c[0] for c in coords.values()) / len(coords)
    lat0 = sum(c[1] for c in coords.values()) / len(coords)
    return Projection(lon0, lat0)


def merge_road_graphs(
    fine: RoadGraph,
    coarse: RoadGraph,
    tolerance_m: float = DEFAULT_MERGE_TOLERANCE_M,
) -> RoadGraph:
    """Merge a coarse overlay into a fine graph.

    Every coarse node within ``tolerance_m`` of a fine node is unified to the
    nearest fine node (ties to the lowest fine node id); surviving coarse
    nodes and all re-endpointed coarse edges are appended after the fine
    ones.  Coarse edges that collapse onto a single node, or duplicate an
    existing (pair, resolution), are dropped.
    """
    fine_nodes = list(fine.coords.items())
    mapping: dict[str, str] = {}
    for cn, cp in coarse.coords.items():
        best: tuple[float, tuple, str] | None = None
        for fn, fp in fine_nodes:
            d = euclid(cp, fp)
            if d <= tolerance_m:
                cand = (d, natural_key(fn), fn)
                if best is None or cand < best:
                    best = cand
        if best is not None:
            mapping[cn] = best[2]
    coords = dict(fine.coords)
    for cn, cp in coarse.coords.items():
        if cn in mapping:
            continue
        if cn in coords:
            raise RoadFileError(f"coarse node id {cn!r} collides with a fine node id")
        coords[cn] = cp
    edges = list(fine.edges)
    seen = {(min(e.a, e.b), max(e.a, e.b), e.resolution) for e in fine.edges}
    for e in coarse.edges:
        a = mapping.get(e.a, e.a)
        b = mapping.get(e.b, e.b)
        if a == b:
            continue
        key = (min(a, b), max(a, b), e.resolution)
        if key in seen:
            continue
        seen.add(key)
        edges.append(RoadEdge(a, b, e.length_m, e.resolution))
    return RoadGraph(coords, edges)


def load_road_network(
    fine_path: str | Path,
    coarse_path: str | Path | None = None,
    tolerance_m: float = DEFAULT_MERGE_TOLERANCE_M,
) -> RoadGraph:
    """Load a fine road file, optionally merging a coarse overlay file.

    When either file is geographic, both are projected about the fine file's
    centroid so merged coordinates stay consistent.
    """
    projection = road_projection(fine_path)
    fine = load_road_graph(fine_path, "fine", projection)
    if coarse_path is None:
        return fine
    coarse = load_road_graph(coarse_path, "coarse", projection)
    return merge_road_graphs(fine, coarse, tolerance_m)


# -- shortest paths -------------------------------------------------------------


def shortest_paths_from(node: str, g: RoadGraph) -> dict[str, float]:
    """Dijkstra distances in metres from ``node`` to every node.

    Unreachable nodes map to math.inf.  Heap ties break on the node id's
    natural key, so traversal order is deterministic.
    """
    if node not in g.coords:
        raise KeyError(f"unknown road node {node!r}")
    dist = {n: math.inf for n in g.coords}
    dist[node] = 0.0
    heap: list[tuple[float, tuple, str]] = [(0.0, natural_key(node), node)]
    done: set[str] = set()
    adj = g.adjacency
    while heap:
        d, _, u = heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, natural_key(v), v))
    return dist


def snap_site(site: Site, g: RoadGraph) -> SiteSnap:
    """Nearest road node by Euclidean distance; ties go to the lowest node id.

    The snap offset is recorded for diagnostics but never added to network
    distances.
    """
    if not g.coords:
        raise RoadFileError("cannot snap onto an empty road graph")
    best: tuple[float, tuple, str] | None = None
    p = (site.x, site.y)
    for n, q in g.coords.items():
        cand = (euclid(p, q), natural_key(n), n)
        if best is None or cand < best:
            best = cand
    return SiteSnap(site.id, best[2], best[0])


# -- OD matrix ------------------------------------------------------------------


@dataclass(frozen=True)
class ODMatrix:
    """Integer-metre distances from each origin site to each destination site.

    ``dist`` is an int64 array with UNREACHABLE (-1) for pairs with no road
    path; all finite entries are >= 0.  ``snaps`` records the snap per site.
    """

    origins: tuple[str, ...]
    destinations: tuple[str, ...]
    dist: np.ndarray
    snaps: tuple[SiteSnap, ...] = ()

    @cached_property
    def origin_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.origins)}

    @cached_property
    def destination_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.destinations)}

    def distance(self, origin: str, destination: str) -> int:
        return int(self.dist[self.origin_index[origin], self.destination_index[destination]])

    def is_reachable(self, origin: str, destination: str) -> bool:
        return self.distance(origin, destination) != UNREACHABLE

    def unreachable_pairs(self) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        oi, di = np.nonzero(self.dist == UNREACHABLE)
        for i, j in zip(oi.tolist(), di.tolist()):
            out.append((self.origins[i], self.destinations[j]))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["village_id", "trader_id", "distance_m"])
        for i, o in enumerate(self.origins):
            for j, d in enumerate(self.destinations):
                w.writerow([o, d, int(self.dist[i, j])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, source: str = "od_matrix") -> "ODMatrix":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise RoadFileError(f"{source}: empty file") from None
        if [h.strip() for h in header] != ["village_id", "trader_id", "distance_m"]:
            raise RoadFileError(f"{source}: header must be 'village_id,trader_id,distance_m'")
        entries: dict[tuple[str, str], int] = {}
        origins: list[str] = []
        destinations: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise RoadFileError(f"{source} line {lineno}: expected 3 fields")
            o, d, ds = (f.strip() for f in row)
            try:
                dist = int(ds)
            except ValueError:
                raise RoadFileError(f"{source} line {lineno}: bad distance {ds!r}") from None
            if dist < 0 and dist != UNREACHABLE:
                raise RoadFileError(f"{source} line {lineno}: negative distance {dist}")
            if (o, d) in entries:
                raise RoadFileError(f"{source} line {lineno}: duplicate pair ({o!r}, {d!r})")
            entries[(o, d)] = dist
            if o not in origins:
                origins.append(o)
            if d not in destinations:
                destinations.append(d)
        mat = np.full((len(origins), len(destinations)), UNREACHABLE, dtype=np.int64)
        for (o, d), dist in entries.items():
            mat[origins.index(o), destinations.index(d)] = dist
        return cls(tuple(origins), tuple(destinations), mat)


def od_cost_matrix(
    villages: Sequence[Site],
    traders: Sequence[Site],
    g: RoadGraph,
) -> ODMatrix:
    """Network distances between snapped village and trader sites.

    One Dijkstra per distinct village snap node; distances round half-up to
    integer metres at emission.  Sites sharing a snap node share a row
    source, and a village and trader snapped to the same node are 0 apart.
    """
    v_snaps = [snap_site(s, g) for s in villages]
    t_snaps = [snap_site(s, g) for s in traders]
    v_nodes = [s.node for s in v_snaps]
    t_nodes = [s.node for s in t_snaps]
    mat = np.full((len(villages), len(traders)), UNREACHABLE, dtype=np.int64)
    by_node: dict[str, dict[str, float]] = {}
    for node in v_nodes:
        if node not in by_node:
            by_node[node] = shortest_paths_from(node, g)
    for i, vn in enumerate(v_nodes):
        dist = by_node[vn]
        for j, tn in enumerate(t_nodes):
            d = dist[tn]
            if math.isfinite(d):
                mat[i, j] = int(math.floor(d + 0.5))
    return ODMatrix(
        tuple(s.id for s in villages),
        tuple(s.id for s in traders),
        mat,
        tuple(v_snaps + t_snaps),
    )


def load_sites(path: str | Path, projection: Projection | None = None) -> list[Site]:
    """Load a ``site_id,x,y`` (or ``site_id,lon,lat``) delimited site file."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise RoadFileError(f"{path}: empty site file")
    header = [f.strip() for f in rows[0].split(",")]
    if header == ["site_id", "x", "y"]:
        geographic = False
    elif header == ["site_id", "lon", "lat"]:
        geographic = True
    else:
        raise RoadFileError(f"{path}: first line must be 'site_id,x,y' or 'site_id,lon,lat'")
    sites: list[Site] = []
    seen: set[str] = set()
    pend: list[tuple[str, float, float]] = []
    for lineno, ln in enumerate(rows[1:], start=2):
        fields = [f.strip() for f in ln.split(",")]
        if len(fields) != 3:
            raise RoadFileError(f"{path} line {lineno}: expected 3 fields")
        sid, xs, ys = fields
        if sid in seen:
            raise RoadFileError(f"{path} line {lineno}: duplicate site id {sid!r}")
        seen.add(sid)
        try:
            pend.append((sid, float(xs), float(ys)))
        except ValueError:
            raise RoadFileError(f"{path} line {lineno}: bad coordinates") from None
    if geographic:
        if projection is None:
            lon0 = sum(p[1] for p in pend) / len(pend)
            lat0 = sum(p[2] for p in pend) / len(pend)
            projection = Projection(lon0, lat0)
        for sid, lon, lat in pend:
            x, y = projection.to_xy(lon, lat)
            sites.append(Site(sid, x, y))
    else:
        sites = [Site(sid, x, y) for sid, x, y in pend]
    return sites
