"""Compiled inner loops for the breadth-first labeler and the greedy tracer."""
import numpy as np
from numba import njit

# N, E, S, W
_DR = np.array([-1, 0, 1, 0], dtype=np.int64)
_DC = np.array([0, 1, 0, -1], dtype=np.int64)

OK = 0
LOCAL_EXTREMUM = 1
BUDGET = 2


@njit(cache=True)
def bfs_labels(open_, origin_r, origin_c):
    h, w = open_.shape
    labels = np.full((h, w), -1, dtype=np.int64)
    queue = np.empty(h * w, dtype=np.int64)
    labels[origin_r, origin_c] = 0
    queue[0] = origin_r * w + origin_c
    head, tail = 0, 1
    while head < tail:
        i = queue[head]
        head += 1
        r, c = i // w, i % w
        nxt = labels[r, c] + 1
        for k in range(4):
            nr, nc = r + _DR[k], c + _DC[k]
            if 0 <= nr < h and 0 <= nc < w and open_[nr, nc] and labels[nr, nc] == -1:
                labels[nr, nc] = nxt
                queue[tail] = nr * w + nc
                tail += 1
    return labels


@njit(cache=True)
def greedy_path(values, open_, sr, sc, gr, gc, descend, max_steps):
    """Returns (flat path indices, length, status)."""
    h, w = open_.shape
    path = np.empty(max_steps + 1, dtype=np.int64)
    r, c = sr, sc
    path[0] = r * w + c
    n = 1
    while not (r == gr and c == gc):
        if n > max_steps:
            return path, n, BUDGET
        best_k = -1
        best_v = values[r, c]
        for k in range(4):
            nr, nc = r + _DR[k], c + _DC[k]
            if 0 <= nr < h and 0 <= nc < w and open_[nr, nc]:
                v = values[nr, nc]
                if descend:
                    better = v < best_v
                else:
                    better = v > best_v
                if better:
                    best_k = k
                    best_v = v
        if best_k < 0:
            return path, n, LOCAL_EXTREMUM
        r, c = r + _DR[best_k], c + _DC[best_k]
        path[n] = r * w + c
        n += 1
    return path, n, OK


@njit(cache=True)
def diffuse(open_, reach, values, ar, ac, decay, clamp, use_clamp, steps, rtol):
    """Explicit reflecting-wall diffusion with decay and an optionally clamped anchor.

    Stops early once every cell in ``reach`` is positive and no cell changed
    by more than ``rtol`` of its value in the last step.  Returns
    (values, steps taken, last relative change).
    """
    h, w = open_.shape
    cur = values.copy()
    nxt = values.copy()
    change = np.inf
    done = 0
    for step in range(steps):
        change = 0.0
        all_positive = True
        for r in range(h):
            for c in range(w):
                if not open_[r, c]:
                    continue
                v = cur[r, c]
                total = 0.0
                k_open = 0
                for k in range(4):
                    nr, nc = r + _DR[k], c + _DC[k]
                    if 0 <= nr < h and 0 <= nc < w and open_[nr, nc]:
                        total += cur[nr, nc]
                        k_open += 1
                # c + (sum(n) - k*c)/4 with nonnegative weights only
                new = (1.0 - decay) * ((1.0 - 0.25 * k_open) * v + 0.25 * total)
                if use_clamp and r == ar and c == ac:
                    new = clamp
                nxt[r, c] = new
                if new > 0.0:
                    d = abs(new - v) / new
                    if d > change:
                        change = d
                elif reach[r, c]:
                    all_positive = False
        cur, nxt = nxt, cur
        done = step + 1
        if all_positive and change <= rtol:
            break
    return cur, done, change
