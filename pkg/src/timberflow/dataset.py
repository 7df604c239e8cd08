"""Dataset directory loading and validation.

A dataset is a directory of delimited files with fixed names:

    villages.csv       village_id,x,y            (required)
    farms.csv          farm_id,village_id,land_use_type,area_ha   (required)
    traders.csv        trader_id,x,y             (required)
    transactions.csv   txn_id,village_id,trader_id,trees_harvested
                       plus optional columns trees_uprooted, volume_m3, farm_id
    yields.csv         land_use_type,trees_per_ha  (optional override)
    od_matrix.csv      village_id,trader_id,distance_m  (optional, else roads)
    roads.csv          road file (optional; see roads module)
    roads_coarse.csv   coarse overlay merged into roads.csv (optional)

Coordinates may be projected metres (x,y) or geographic (lon,lat headers);
geographic files in one dataset share the road network's projection so they
stay mutually consistent.  Every loader error carries the file and line it
came from.  The dataset fingerprint hashes the bytes of every file listed
above that is present, so it changes exactly when an input byte changes.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .roads import (
    ODMatrix,
    Projection,
    RoadFileError,
    RoadGraph,
    Site,
    load_road_graph,
    merge_road_graphs,
    road_projection,
)

DATASET_FILES = (
    "villages.csv",
    "farms.csv",
    "traders.csv",
    "transactions.csv",
    "yields.csv",
    "od_matrix.csv",
    "roads.csv",
    "roads_coarse.csv",
)

REQUIRED_FILES = DATASET_FILES[:4]


class DatasetError(ValueError):
    """Malformed or inconsistent dataset; message names file and row."""


@dataclass(frozen=True, slots=True)
class Village:
    id: str
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class Farm:
    id: str
    village_id: str
    land_use_type: str
    area_ha: float


@dataclass(frozen=True, slots=True)
class Trader:
    id: str
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class Transaction:
    id: str
    village_id: str
    trader_id: str
    trees_harvested: int
    trees_uprooted: int | None = None
    volume_m3: float | None = None
    farm_id: str | None = None


@dataclass(frozen=True)
class Dataset:
    """A fully cross-validated dataset directory in memory."""

    path: Path
    villages: tuple[Village, ...]
    farms: tuple[Farm, ...]
    traders: tuple[Trader, ...]
    transactions: tuple[Transaction, ...]
    yields: Mapping[str, float] | None
    od: ODMatrix | None
    roads: RoadGraph | None
    fingerprint: str

    @cached_property
    def village_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.villages)

    @cached_property
    def trader_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.traders)

    @cached_property
    def has_farm_attribution(self) -> bool:
        return any(t.farm_id is not None for t in self.transactions)

    def summary(self) -> dict:
        if self.yields is not None:
            yield_source = "file"
        elif self.has_farm_attribution:
            yield_source = "transactions"
        else:
            yield_source = "missing"
        if self.od is not None:
            od_source = "file"
        elif self.roads is not None:
            od_source = "roads"
        else:
            od_source = "missing"
        return {
            "villages": len(self.villages),
            "farms": len(self.farms),
            "traders": len(self.traders),
            "transactions": len(self.transactions),
            "land_use_types": len({f.land_use_type for f in self.farms}),
            "yield_source": yield_source,
            "od_source": od_source,
            "fingerprint": self.fingerprint,
        }


def dataset_fingerprint(path: str | Path) -> str:
    """sha256 over the bytes of every recognized dataset file present."""
    root = Path(path)
    outer = hashlib.sha256()
    for name in DATASET_FILES:
        p = root / name
        if p.is_file():
            inner = hashlib.sha256(p.read_bytes()).hexdigest()
            outer.update(f"{name}:{inner}\n".encode())
    return outer.hexdigest()


def _rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            yield lineno, [f.strip() for f in row]


def _check_header(path: Path, got: list[str], required: list[str], optional: Sequence[str] = ()) -> list[str]:
    if got[: len(required)] != required:
        raise DatasetError(
            f"{path.name}: header must start with {','.join(required)!r}, got {','.join(got)!r}"
        )
    extras = got[len(required) :]
    for col in extras:
        if col not in optional:
            raise DatasetError(f"{path.name}: unknown column {col!r}")
    if len(set(got)) != len(got):
        raise DatasetError(f"{path.name}: duplicate column in header")
    return extras


def _float_field(path: Path, lineno: int, name: str, raw: str) -> float:
    try:
        val = float(raw)
    except ValueError:
        raise DatasetError(f"{path.name} line {lineno}: bad {name} {raw!r}") from None
    if not math.isfinite(val):
        raise DatasetError(f"{path.name} line {lineno}: non-finite {name}")
    return val


def _int_field(path: Path, lineno: int, name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise DatasetError(f"{path.name} line {lineno}: bad {name} {raw!r}") from None


def _load_point_file(
    path: Path, id_col: str, projection: Projection | None
) -> list[tuple[str, float, float]]:
    rows = _rows(path)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise DatasetError(f"{path.name}: empty file") from None
    if header == [id_col, "x", "y"]:
        geographic = False
    elif header == [id_col, "lon", "lat"]:
        geographic = True
    else:
        raise DatasetError(
            f"{path.name}: header must be '{id_col},x,y' or '{id_col},lon,lat'"
        )
    out: list[tuple[str, float, float]] = []
    seen: set[str] = set()
    for lineno, row in rows:
        if len(row) != 3:
            raise DatasetError(f"{path.name} line {lineno}: expected 3 fields")
        ident = row[0]
        if not ident:
            raise DatasetError(f"{path.name} line {lineno}: empty {id_col}")
        if ident in seen:
            raise DatasetError(f"{path.name} line {lineno}: duplicate {id_col} {ident!r}")
        seen.add(ident)
        a = _float_field(path, lineno, "coordinate", row[1])
        b = _float_field(path, lineno, "coordinate", row[2])
        if geographic:
            if projection is None:
                projection = Projection(a, b)  # degenerate fallback: first point
            a, b = projection.to_xy(a, b)
        out.append((ident, a, b))
    return out


def _load_farms(path: Path, village_ids: set[str]) -> list[Farm]:
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise DatasetError(f"{path.name}: empty file") from None
    _check_header(path, header, ["farm_id", "village_id", "land_use_type", "area_ha"])
    farms: list[Farm] = []
    seen: set[str] = set()
    for lineno, row in rows:
        if len(row) != 4:
            raise DatasetError(f"{path.name} line {lineno}: expected 4 fields")
        fid, vid, lut, area_raw = row
        if fid in seen:
            raise DatasetError(f"{path.name} line {lineno}: duplicate farm_id {fid!r}")
        seen.add(fid)
        if vid not in village_ids:
            raise DatasetError(f"{path.name} line {lineno}: unknown village_id {vid!r}")
        if not lut:
            raise DatasetError(f"{path.name} line {lineno}: empty land_use_type")
        area = _float_field(path, lineno, "area_ha", area_raw)
        if area <= 0:
            raise DatasetError(f"{path.name} line {lineno}: area_ha must be positive")
        farms.append(Farm(fid, vid, lut, area))
    return farms


def _load_transactions(
    path: Path, village_ids: set[str], trader_ids: set[str], farm_villages: Mapping[str, str]
) -> list[Transaction]:
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise DatasetError(f"{path.name}: empty file") from None
    required = ["txn_id", "village_id", "trader_id", "trees_harvested"]
    extras = _check_header(path, header, required, ("trees_uprooted", "volume_m3", "farm_id"))
    col = {name: required.index(name) for name in required}
    col.update({name: len(required) + i for i, name in enumerate(extras)})
    txns: list[Transaction] = []
    seen: set[str] = set()
    for lineno, row in rows:
        if len(row) != len(header):
            raise DatasetError(
                f"{path.name} line {lineno}: expected {len(header)} fields, got {len(row)}"
            )
        tid = row[col["txn_id"]]
        if tid in seen:
            raise DatasetError(f"{path.name} line {lineno}: duplicate txn_id {tid!r}")
        seen.add(tid)
        vid = row[col["village_id"]]
        if vid not in village_ids:
            raise DatasetError(f"{path.name} line {lineno}: unknown village_id {vid!r}")
        trd = row[col["trader_id"]]
        if trd not in trader_ids:
            raise DatasetError(f"{path.name} line {lineno}: unknown trader_id {trd!r}")
        harvested = _int_field(path, lineno, "trees_harvested", row[col["trees_harvested"]])
        if harvested < 0:
            raise DatasetError(f"{path.name} line {lineno}: negative trees_harvested")
        uprooted: int | None = None
        if "trees_uprooted" in col and row[col["trees_uprooted"]] != "":
            uprooted = _int_field(path, lineno, "trees_uprooted", row[col["trees_uprooted"]])
            if not 0 <= uprooted <= harvested:
                raise DatasetError(
                    f"{path.name} line {lineno}: trees_uprooted outside [0, trees_harvested]"
                )
        volume: float | None = None
        if "volume_m3" in col and row[col["volume_m3"]] != "":
            volume = _float_field(path, lineno, "volume_m3", row[col["volume_m3"]])
            if volume < 0:
                raise DatasetError(f"{path.name} line {lineno}: negative volume_m3")
        farm: str | None = None
        if "farm_id" in col and row[col["farm_id"]] != "":
            farm = row[col["farm_id"]]
            if farm not in farm_villages:
                raise DatasetError(f"{path.name} line {lineno}: unknown farm_id {farm!r}")
            if farm_villages[farm] != vid:
                raise DatasetError(
                    f"{path.name} line {lineno}: farm {farm!r} belongs to village "
                    f"{farm_villages[farm]!r}, not {vid!r}"
                )
        txns.append(Transaction(tid, vid, trd, harvested, uprooted, volume, farm))
    return txns


def _load_yields(path: Path, land_use_types: set[str]) -> dict[str, float]:
    rows = _rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise DatasetError(f"{path.name}: empty file") from None
    _check_header(path, header, ["land_use_type", "trees_per_ha"])
    table: dict[str, float] = {}
    for lineno, row in rows:
        if len(row) != 2:
            raise DatasetError(f"{path.name} line {lineno}: expected 2 fields")
        lut, raw = row
        if lut in table:
            raise DatasetError(f"{path.name} line {lineno}: duplicate land_use_type {lut!r}")
        val = _float_field(path, lineno, "trees_per_ha", raw)
        if val < 0:
            raise DatasetError(f"{path.name} line {lineno}: negative trees_per_ha")
        table[lut] = val
    missing = sorted(land_use_types - set(table))
    if missing:
        raise DatasetError(f"{path.name}: no yield for land_use_type(s) {', '.join(missing)}")
    return table


def load_dataset(path: str | Path) -> Dataset:
    """Load and cross-validate a dataset directory."""
    root = Path(path)
    if not root.is_dir():
        raise DatasetError(f"dataset directory not found: {root}")
    for name in REQUIRED_FILES:
        if not (root / name).is_file():
            raise DatasetError(f"missing required file {name}")

    roads: RoadGraph | None = None
    projection: Projection | None = None
    if (root / "roads.csv").is_file():
        try:
            projection = road_projection(root / "roads.csv")
            roads = load_road_graph(root / "roads.csv", "fine", projection)
            if (root / "roads_coarse.csv").is_file():
                coarse = load_road_graph(root / "roads_coarse.csv", "coarse", projection)
                roads = merge_road_graphs(roads, coarse)
        except RoadFileError as exc:
            raise DatasetError(str(exc)) from exc

    villages = [
        Village(*row) for row in _load_point_file(root / "villages.csv", "village_id", projection)
    ]
    traders = [
        Trader(*row) for row in _load_point_file(root / "traders.csv", "trader_id", projection)
    ]
    village_ids = {v.id for v in villages}
    trader_ids = {t.id for t in traders}
    if not villages:
        raise DatasetError("villages.csv: no villages")
    if not traders:
        raise DatasetError("traders.csv: no traders")

    farms = _load_farms(root / "farms.csv", village_ids)
    farm_villages = {f.id: f.village_id for f in farms}
    txns = _load_transactions(root / "transactions.csv", village_ids, trader_ids, farm_villages)

    yields: dict[str, float] | None = None
    if (root / "yields.csv").is_file():
        yields = _load_yields(root / "yields.csv", {f.land_use_type for f in farms})

    od: ODMatrix | None = None
    if (root / "od_matrix.csv").is_file():
        try:
            od = ODMatrix.from_csv((root / "od_matrix.csv").read_text(encoding="utf-8"))
        except RoadFileError as exc:
            raise DatasetError(str(exc)) from exc
        ids = set(od.origins)
        missing_v = sorted(village_ids - ids)
        if missing_v:
            raise DatasetError(f"od_matrix.csv: no rows for village(s) {', '.join(missing_v[:5])}")
        missing_t = sorted(trader_ids - set(od.destinations))
        if missing_t:
            raise DatasetError(f"od_matrix.csv: no rows for trader(s) {', '.join(missing_t[:5])}")

    return Dataset(
        path=root,
        villages=tuple(villages),
        farms=tuple(farms),
        traders=tuple(traders),
        transactions=tuple(txns),
        yields=yields,
        od=od,
        roads=roads,
        fingerprint=dataset_fingerprint(root),
    )


def village_sites(ds: Dataset) -> list[Site]:
    return [Site(v.id, v.x, v.y) for v in ds.villages]


def trader_sites(ds: Dataset) -> list[Site]:
    return [Site(t.id, t.x, t.y) for t in ds.traders]
