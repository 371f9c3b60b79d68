"""Compact channel-cell indexing shared by the numerical engines."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .maze import Maze


@dataclass(frozen=True, eq=False)
class ChannelGraph:
    maze: Maze
    index: np.ndarray  # (h, w) compact index, -1 on walls
    rows: np.ndarray
    cols: np.ndarray
    nbr: np.ndarray  # (n, 4) compact neighbor index in N,E,S,W order, -1 if none
    # undirected edges (a < b), row-major by a then E before S
    edge_a: np.ndarray
    edge_b: np.ndarray

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def degree(self) -> np.ndarray:
        return (self.nbr >= 0).sum(axis=1)

    def of(self, c) -> int:
        return int(self.index[c[0], c[1]])

    def scatter(self, compact: np.ndarray, fill=np.nan) -> np.ndarray:
        out = np.full(self.index.shape, fill, dtype=float)
        out[self.rows, self.cols] = compact
        return out

    def laplacian(self, conductance=None) -> sparse.csr_matrix:
        """Weighted graph Laplacian over channel cells (unit conductance by default)."""
        g = np.ones(len(self.edge_a)) if conductance is None else np.asarray(conductance, dtype=float)
        n = self.n
        a, b = self.edge_a, self.edge_b
        off = sparse.coo_matrix((np.concatenate([-g, -g]), (np.concatenate([a, b]), np.concatenate([b, a]))), shape=(n, n))
        diag = np.bincount(a, weights=g, minlength=n) + np.bincount(b, weights=g, minlength=n)
        return (off + sparse.diags(diag)).tocsr()


def channel_graph(maze: Maze) -> ChannelGraph:
    rows, cols = np.nonzero(maze.open)
    index = np.full(maze.open.shape, -1, dtype=np.int64)
    index[rows, cols] = np.arange(len(rows))
    flat = maze.neighbor_table[rows * maze.width + cols]
    nbr = np.where(flat >= 0, index.ravel()[np.maximum(flat, 0)], -1)
    # E (k=1) and S (k=2) neighbors give each undirected edge exactly once
    a_parts, b_parts = [], []
    for k in (1, 2):
        has = nbr[:, k] >= 0
        a_parts.append(np.nonzero(has)[0])
        b_parts.append(nbr[has, k])
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    order = np.lexsort((b, a))
    return ChannelGraph(maze, index, rows, cols, nbr, a[order], b[order])
