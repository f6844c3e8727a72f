"""Isolation tree kernels.

``build_tree`` and ``path_lengths_loop`` are compiled with numba when it is
available; ``build_tree_vectorized`` and ``path_lengths_vectorized`` are the
pure-numpy twins used when numba is disabled. Every path consumes the
pre-drawn uniforms in the same order, so compiled and interpreted results are
bitwise identical.
"""

from __future__ import annotations

import numpy as np

from .._accel import NUMBA_ENABLED, njit

LEAF = -1


@njit
def build_tree(X, uniforms, height_limit, feature, threshold, left, right, size):
    """Grow one isolation tree on ``X`` into preallocated node arrays.

    Nodes are numbered in creation order, children allocated in pairs. Each
    internal node consumes two uniforms: one picks the split dimension among
    the dimensions with non-zero range, one places the split inside that
    range. Returns the number of nodes used.
    """
    m, k = X.shape
    order = np.arange(m)
    lo = np.empty(k)
    hi = np.empty(k)
    valid = np.empty(k, dtype=np.int64)

    # stack of (node, start, end, depth)
    stack = np.empty((2 * m + 2, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    u = 0
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        count = end - start
        size[node] = count
        feature[node] = LEAF
        threshold[node] = 0.0
        left[node] = LEAF
        right[node] = LEAF
        if count <= 1 or depth >= height_limit:
            continue

        for j in range(k):
            lo[j] = np.inf
            hi[j] = -np.inf
        for i in range(start, end):
            row = order[i]
            for j in range(k):
                v = X[row, j]
                if v < lo[j]:
                    lo[j] = v
                if v > hi[j]:
                    hi[j] = v
        n_valid = 0
        for j in range(k):
            if hi[j] > lo[j]:
                valid[n_valid] = j
                n_valid += 1
        if n_valid == 0:
            continue

        pick = int(uniforms[u] * n_valid)
        if pick >= n_valid:
            pick = n_valid - 1
        dim = valid[pick]
        a = lo[dim]
        b = hi[dim]
        split = a + uniforms[u + 1] * (b - a)
        u += 2
        if not (a < split < b):
            split = a + 0.5 * (b - a)
            if not split > a:
                split = b

        # partition order[start:end] so that X[., dim] < split comes first
        i = start
        j = end - 1
        while i <= j:
            if X[order[i], dim] < split:
                i += 1
            else:
                tmp = order[i]
                order[i] = order[j]
                order[j] = tmp
                j -= 1
        mid = i

        feature[node] = dim
        threshold[node] = split
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        # right pushed first so the left subtree is expanded first
        stack[top, 0] = right_id
        stack[top, 1] = mid
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = left_id
        stack[top, 1] = start
        stack[top, 2] = mid
        stack[top, 3] = depth + 1
        top += 1
    return n_nodes


def build_tree_vectorized(X, uniforms, height_limit, feature, threshold, left, right, size):
    """Numpy twin of :func:`build_tree` (same node numbering and uniform schedule)."""
    m = X.shape[0]
    stack = [(0, np.arange(m), 0)]
    n_nodes = 1
    u = 0
    while stack:
        node, rows, depth = stack.pop()
        size[node] = rows.size
        feature[node] = LEAF
        threshold[node] = 0.0
        left[node] = LEAF
        right[node] = LEAF
        if rows.size <= 1 or depth >= height_limit:
            continue
        sub = X[rows]
        lo = sub.min(axis=0)
        hi = sub.max(axis=0)
        valid = np.flatnonzero(hi > lo)
        if valid.size == 0:
            continue
        pick = min(int(uniforms[u] * valid.size), valid.size - 1)
        dim = valid[pick]
        a, b = lo[dim], hi[dim]
        split = a + uniforms[u + 1] * (b - a)
        u += 2
        if not (a < split < b):
            split = a + 0.5 * (b - a)
            if not split > a:
                split = b
        goes_left = sub[:, dim] < split
        feature[node] = dim
        threshold[node] = split
        left[node], right[node] = n_nodes, n_nodes + 1
        stack.append((n_nodes + 1, rows[~goes_left], depth + 1))
        stack.append((n_nodes, rows[goes_left], depth + 1))
        n_nodes += 2
    return n_nodes


@njit
def path_lengths_loop(X, feature, threshold, left, right, size, leaf_adjust):
    """Sum over trees of ``depth + c(leaf size)`` for every row of ``X``."""
    n = X.shape[0]
    n_trees = feature.shape[0]
    total = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = 0
            depth = 0
            while feature[t, node] != LEAF:
                if X[i, feature[t, node]] < threshold[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
                depth += 1
            acc += depth + leaf_adjust[size[t, node]]
        total[i] = acc
    return total


def path_lengths_vectorized(X, feature, threshold, left, right, size, leaf_adjust):
    """Numpy twin of :func:`path_lengths_loop`, advancing all rows level by level."""
    n = X.shape[0]
    rows = np.arange(n)
    total = np.zeros(n)
    for t in range(feature.shape[0]):
        f, thr, lft, rgt = feature[t], threshold[t], left[t], right[t]
        node = np.zeros(n, dtype=np.int64)
        depth = np.zeros(n, dtype=np.int64)
        active = f[node] != LEAF
        while active.any():
            idx = rows[active]
            cur = node[idx]
            go_left = X[idx, f[cur]] < thr[cur]
            node[idx] = np.where(go_left, lft[cur], rgt[cur])
            depth[idx] += 1
            active[idx] = f[node[idx]] != LEAF
        total += depth + leaf_adjust[size[t, node]]
    return total


def grow(X, uniforms, height_limit, feature, threshold, left, right, size):
    impl = build_tree if NUMBA_ENABLED else build_tree_vectorized
    return impl(X, uniforms, height_limit, feature, threshold, left, right, size)


def path_lengths(X, feature, threshold, left, right, size, leaf_adjust):
    impl = path_lengths_loop if NUMBA_ENABLED else path_lengths_vectorized
    return impl(X, feature, threshold, left, right, size, leaf_adjust)
