"""Reading edge lists, node features and cluster memberships."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..graph import Graph, from_arrays


class DatasetError(ValueError):
    pass


@dataclass
class Dataset:
    graph: Graph
    id_map: dict
    features: np.ndarray | None = None
    clusters: dict | None = None

    @property
    def raw_ids(self) -> np.ndarray:
        """Original id of every dense node index."""
        out = np.empty(len(self.id_map), dtype=np.int64)
        for raw, dense in self.id_map.items():
            out[dense] = raw
        return out


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def read_edge_list(path) -> tuple[Graph, dict]:
    """Whitespace separated ``u v`` lines; ids are remapped densely in order of appearance."""
    id_map: dict[int, int] = {}
    src, dst = [], []
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: node ids must be integers") from None
        src.append(id_map.setdefault(u, len(id_map)))
        dst.append(id_map.setdefault(v, len(id_map)))
    if not id_map:
        raise DatasetError(f"{path}: no edges")
    G = from_arrays(len(id_map), np.array(src), np.array(dst))
    return G, id_map


def read_features(path, id_map: dict) -> np.ndarray:
    """CSV with the raw node id first and real-valued columns after it."""
    rows: dict[int, list[float]] = {}
    width = None
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), 1):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                raw = int(rec[0])
                vals = [float(v) for v in rec[1:]]
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise DatasetError(f"{path}:{lineno}: malformed feature row") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise DatasetError(f"{path}:{lineno}: expected {width} features, got {len(vals)}")
            if raw not in id_map:
                raise DatasetError(f"{path}:{lineno}: node {raw} does not appear in the edge list")
            if not np.all(np.isfinite(vals)):
                raise DatasetError(f"{path}:{lineno}: non-finite feature")
            rows[id_map[raw]] = vals
    if len(rows) != len(id_map):
        raise DatasetError(f"{path}: {len(rows)} feature rows for {len(id_map)} nodes")
    X = np.empty((len(id_map), width or 0))
    for i, vals in rows.items():
        X[i] = vals
    return X


def read_clusters(path, id_map: dict) -> dict:
    """``node_id cluster_id`` lines; returns cluster id -> sorted dense node array."""
    members: dict[int, list[int]] = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected 'node_id cluster_id'")
        try:
            raw, cid = int(parts[0]), int(parts[1])
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: ids must be integers") from None
        if raw not in id_map:
            raise DatasetError(f"{path}:{lineno}: node {raw} does not appear in the edge list")
        members.setdefault(cid, []).append(id_map[raw])
    return {c: np.unique(v) for c, v in sorted(members.items())}


def load_dataset(edge_path, feature_path=None, label_path=None) -> Dataset:
    for p in (edge_path, feature_path, label_path):
        if p is not None and not Path(p).is_file():
            raise FileNotFoundError(p)
    G, id_map = read_edge_list(edge_path)
    X = read_features(feature_path, id_map) if feature_path else None
    clusters = read_clusters(label_path, id_map) if label_path else None
    return Dataset(G, id_map, X, clusters)


def write_id_map(path, id_map: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for raw, dense in sorted(id_map.items(), key=lambda kv: kv[1]):
            fh.write(f"{raw} {dense}\n")
