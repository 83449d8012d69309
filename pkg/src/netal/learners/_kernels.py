"""Flat-array tree kernels.

Trees are stored as parallel arrays (feature, threshold, left, right,
value); feature = -1 marks a leaf. Builders are stack-based rather than
recursive and use an inline splitmix64 generator so that one uint64 seed
fully determines a tree. All kernels are single-threaded: determinism of
summation order is part of the reproducibility contract.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True, inline="always")
def _mix(state):
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _rand_unit(state):
    return float(_mix(state) >> _S11) * _INV53


@njit(cache=True, inline="always")
def _rand_below(state, n):
    return int(_mix(state) % np.uint64(n))


@njit(cache=True)
def build_gini_tree(X, y, sample_idx, mtry, max_depth, seed, importance):
    """CART with Gini impurity on a fixed sample of rows.

    Each split draws a random feature permutation and evaluates the first
    `mtry` features that are non-constant at the node (so an impure node
    only becomes a leaf if every feature is constant on it). Candidate
    thresholds are midpoints of consecutive distinct sorted values; ties
    in impurity resolve to the lowest feature index, then the lowest
    threshold. Zero-gain splits are accepted: growth continues until
    leaves are pure or featureless. Leaf value is the Laplace-smoothed
    positive ratio (n1+1)/(n+2). Gini decreases accumulate into
    `importance` (indexed by feature), scaled by node size.
    """
    n_total = sample_idx.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n_total + 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros(max_nodes, np.float64)

    idx = sample_idx.copy()
    tmp = np.empty(n_total, np.int64)
    vals = np.empty(n_total, np.float64)
    labs = np.empty(n_total, np.int64)
    perm = np.empty(d, np.int64)
    cand = np.empty(d, np.int64)
    state = np.empty(1, np.uint64)
    state[0] = seed

    stack_node = np.empty(max_nodes, np.int64)
    stack_start = np.empty(max_nodes, np.int64)
    stack_end = np.empty(max_nodes, np.int64)
    stack_depth = np.empty(max_nodes, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n_total
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        m = end - start
        c1 = 0
        for i in range(start, end):
            c1 += y[idx[i]]
        c0 = m - c1
        value[node] = (c1 + 1.0) / (m + 2.0)
        if c1 == 0 or c0 == 0 or m < 2 or depth >= max_depth:
            continue

        for j in range(d):
            perm[j] = j
        for j in range(d - 1, 0, -1):
            k = _rand_below(state, j + 1)
            t = perm[j]
            perm[j] = perm[k]
            perm[k] = t
        n_cand = 0
        for jj in range(d):
            f = perm[jj]
            lo = X[idx[start], f]
            hi = lo
            for i in range(start + 1, end):
                v = X[idx[i], f]
                if v < lo:
                    lo = v
                elif v > hi:
                    hi = v
            if hi > lo:
                cand[n_cand] = f
                n_cand += 1
                if n_cand >= mtry:
                    break
        if n_cand == 0:
            continue
        # ascending feature order makes the tie-break well defined
        for a in range(1, n_cand):
            key = cand[a]
            b = a - 1
            while b >= 0 and cand[b] > key:
                cand[b + 1] = cand[b]
                b -= 1
            cand[b + 1] = key

        best_s = -1.0
        best_f = -1
        best_thr = 0.0
        for cc in range(n_cand):
            f = cand[cc]
            for i in range(m):
                vals[i] = X[idx[start + i], f]
                labs[i] = y[idx[start + i]]
            order = np.argsort(vals[:m])
            l0 = 0
            l1 = 0
            for i in range(m - 1):
                o = order[i]
                if labs[o] == 1:
                    l1 += 1
                else:
                    l0 += 1
                v_here = vals[o]
                v_next = vals[order[i + 1]]
                if v_next > v_here:
                    ml = i + 1
                    mr = m - ml
                    r0 = c0 - l0
                    r1 = c1 - l1
                    s = (l0 * l0 + l1 * l1) / ml + (r0 * r0 + r1 * r1) / mr
                    if s > best_s:
                        best_s = s
                        best_f = f
                        best_thr = (v_here + v_next) / 2.0
        if best_f < 0:
            continue

        nl = 0
        nr = 0
        for i in range(start, end):
            row = idx[i]
            if X[row, best_f] <= best_thr:
                idx[start + nl] = row
                nl += 1
            else:
                tmp[nr] = row
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = tmp[i]

        importance[best_f] += best_s - (c0 * c0 + c1 * c1) / m

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[top] = n_nodes
        stack_start[top] = start
        stack_end[top] = start + nl
        stack_depth[top] = depth + 1
        stack_node[top + 1] = n_nodes + 1
        stack_start[top + 1] = start + nl
        stack_end[top + 1] = end
        stack_depth[top + 1] = depth + 1
        top += 2
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


@njit(cache=True)
def build_regression_tree(X, grad, hess, max_depth, min_gain):
    """Least-squares tree on pseudo-residuals with Newton leaf values.

    Splits maximize sum(g)^2/m pooled over both sides; a split is taken
    only when it improves on the parent by more than `min_gain`. Leaf
    value is sum(grad)/sum(hess), the one-step Newton estimate for
    logistic loss. Uses every feature and every row (no randomness).
    """
    n_total = X.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n_total + 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros(max_nodes, np.float64)

    idx = np.arange(n_total)
    tmp = np.empty(n_total, np.int64)
    vals = np.empty(n_total, np.float64)
    gs = np.empty(n_total, np.float64)

    stack_node = np.empty(max_nodes, np.int64)
    stack_start = np.empty(max_nodes, np.int64)
    stack_end = np.empty(max_nodes, np.int64)
    stack_depth = np.empty(max_nodes, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n_total
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        m = end - start
        gsum = 0.0
        hsum = 0.0
        for i in range(start, end):
            gsum += grad[idx[i]]
            hsum += hess[idx[i]]
        value[node] = gsum / hsum if hsum > 1e-12 else 0.0
        if m < 2 or depth >= max_depth:
            continue

        parent_s = gsum * gsum / m
        best_s = parent_s + min_gain
        best_f = -1
        best_thr = 0.0
        for f in range(d):
            for i in range(m):
                vals[i] = X[idx[start + i], f]
                gs[i] = grad[idx[start + i]]
            order = np.argsort(vals[:m])
            lsum = 0.0
            for i in range(m - 1):
                o = order[i]
                lsum += gs[o]
                v_here = vals[o]
                v_next = vals[order[i + 1]]
                if v_next > v_here:
                    ml = i + 1
                    mr = m - ml
                    rsum = gsum - lsum
                    s = lsum * lsum / ml + rsum * rsum / mr
                    if s > best_s:
                        best_s = s
                        best_f = f
                        best_thr = (v_here + v_next) / 2.0
        if best_f < 0:
            continue

        nl = 0
        nr = 0
        for i in range(start, end):
            row = idx[i]
            if X[row, best_f] <= best_thr:
                idx[start + nl] = row
                nl += 1
            else:
                tmp[nr] = row
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = tmp[i]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[top] = n_nodes
        stack_start[top] = start
        stack_end[top] = start + nl
        stack_depth[top] = depth + 1
        stack_node[top + 1] = n_nodes + 1
        stack_start[top + 1] = start + nl
        stack_end[top + 1] = end
        stack_depth[top + 1] = depth + 1
        top += 2
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


@njit(cache=True)
def build_isolation_tree(X, sample_idx, max_depth, seed):
    """Random isolation tree: random feature among non-constant ones,
    uniform split point strictly inside (min, max); rows with value
    below the split go left. Leaves record their size in `value`.
    """
    n_total = sample_idx.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n_total + 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros(max_nodes, np.float64)

    idx = sample_idx.copy()
    tmp = np.empty(n_total, np.int64)
    cand = np.empty(d, np.int64)
    lo_buf = np.empty(d, np.float64)
    hi_buf = np.empty(d, np.float64)
    state = np.empty(1, np.uint64)
    state[0] = seed

    stack_node = np.empty(max_nodes, np.int64)
    stack_start = np.empty(max_nodes, np.int64)
    stack_end = np.empty(max_nodes, np.int64)
    stack_depth = np.empty(max_nodes, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n_total
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        m = end - start
        value[node] = m
        if m < 2 or depth >= max_depth:
            continue
        n_cand = 0
        for f in range(d):
            lo = X[idx[start], f]
            hi = lo
            for i in range(start + 1, end):
                v = X[idx[i], f]
                if v < lo:
                    lo = v
                elif v > hi:
                    hi = v
            if hi > lo:
                cand[n_cand] = f
                lo_buf[n_cand] = lo
                hi_buf[n_cand] = hi
                n_cand += 1
        if n_cand == 0:
            continue
        pick = _rand_below(state, n_cand)
        f = cand[pick]
        lo = lo_buf[pick]
        hi = hi_buf[pick]
        p = lo + (hi - lo) * _rand_unit(state)
        if p <= lo:
            p = np.nextafter(lo, hi)

        nl = 0
        nr = 0
        for i in range(start, end):
            row = idx[i]
            if X[row, f] < p:
                idx[start + nl] = row
                nl += 1
            else:
                tmp[nr] = row
                nr += 1
        for i in range(nr):
            idx[start + nl + i] = tmp[i]

        feature[node] = f
        threshold[node] = p
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[top] = n_nodes
        stack_start[top] = start
        stack_end[top] = start + nl
        stack_depth[top] = depth + 1
        stack_node[top + 1] = n_nodes + 1
        stack_start[top + 1] = start + nl
        stack_end[top + 1] = end
        stack_depth[top + 1] = depth + 1
        top += 2
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


@njit(cache=True)
def forest_mean_value(X, feature, threshold, left, right, value, offsets):
    """Mean leaf value across trees; node links are global indices.
    Decision rule at internal nodes: go left iff x[f] <= threshold."""
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.empty(n, np.float64)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = offsets[t]
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            acc += value[node]
        out[i] = acc / n_trees
    return out


@njit(cache=True)
def forest_sum_value(X, feature, threshold, left, right, value, offsets):
    """Sum of leaf values across trees (boosting accumulator)."""
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.zeros(n, np.float64)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = offsets[t]
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            acc += value[node]
        out[i] = acc
    return out


@njit(cache=True)
def isolation_mean_path(X, feature, threshold, left, right, value, offsets, c_table):
    """Mean path length across isolation trees.

    Path length = edge depth of the reached leaf plus the unsuccessful
    search adjustment c(leaf_size) from `c_table`. Internal rule: go
    left iff x[f] < threshold (strict, matching the builder)."""
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.empty(n, np.float64)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = offsets[t]
            depth = 0.0
            while feature[node] >= 0:
                if X[i, feature[node]] < threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
                depth += 1.0
            acc += depth + c_table[int(value[node])]
        out[i] = acc / n_trees
    return out
