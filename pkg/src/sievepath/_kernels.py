"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

Set the environment variable ``SIEVEPATH_NUMBA=0`` to force the numpy
fallback (useful for debugging and for the kernel benchmark). The flag is
read once at import time.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("SIEVEPATH_NUMBA", "1") != "0"

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False


# ---------------------------------------------------------------------------
# numpy implementations (always defined; the fallback path)

def _column_norms_np(V):
    return np.sqrt(np.einsum("ij,ij->j", V, V))


def _prox_columns_np(V, tau):
    # columnwise argmin_u 0.5||u - v||^2 + tau_l ||u||: scale by max(0, 1 - tau/||v||)
    norms = _column_norms_np(V)
    scale = np.zeros_like(norms)
    nz = norms > 0.0
    scale[nz] = np.maximum(0.0, 1.0 - tau[nz] / norms[nz])
    return V * scale


def _project_columns_np(V, radii):
    # columnwise Euclidean projection onto the ball of radius radii_l
    norms = _column_norms_np(V)
    scale = np.ones_like(norms)
    over = norms > radii
    scale[over] = radii[over] / norms[over]
    return V * scale


def _union_find_min_labels_np(n, ei, ej):
    # plain-python union-find; label = smallest member of the component
    parent = np.arange(n, dtype=np.int64)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for k in range(len(ei)):
        ra, rb = find(ei[k]), find(ej[k])
        if ra == rb:
            continue
        # smaller root wins so the representative stays the min index
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb
    labels = np.empty(n, dtype=np.int64)
    for a in range(n):
        labels[a] = find(a)
    return labels


# ---------------------------------------------------------------------------
# numba implementations (loop style; compiled lazily, cached on disk)

if NUMBA_ENABLED:

    @njit(cache=True)
    def _column_norms_nb(V):
        d, m = V.shape
        out = np.empty(m)
        for j in range(m):
            s = 0.0
            for i in range(d):
                s += V[i, j] * V[i, j]
            out[j] = np.sqrt(s)
        return out

    @njit(cache=True)
    def _prox_columns_nb(V, tau):
        d, m = V.shape
        out = np.zeros((d, m))
        for j in range(m):
            s = 0.0
            for i in range(d):
                s += V[i, j] * V[i, j]
            nrm = np.sqrt(s)
            if nrm > tau[j]:
                c = 1.0 - tau[j] / nrm
                for i in range(d):
                    out[i, j] = c * V[i, j]
        return out

    @njit(cache=True)
    def _project_columns_nb(V, radii):
        d, m = V.shape
        out = np.empty((d, m))
        for j in range(m):
            s = 0.0
            for i in range(d):
                s += V[i, j] * V[i, j]
            nrm = np.sqrt(s)
            if nrm > radii[j]:
                c = radii[j] / nrm
            else:
                c = 1.0
            for i in range(d):
                out[i, j] = c * V[i, j]
        return out

    @njit(cache=True)
    def _union_find_min_labels_nb(n, ei, ej):
        parent = np.arange(n)
        for k in range(len(ei)):
            a = ei[k]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = ej[k]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a == b:
                continue
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
        labels = np.empty(n, dtype=np.int64)
        for a in range(n):
            r = a
            while parent[r] != r:
                r = parent[r]
            labels[a] = r
        return labels

    column_norms = _column_norms_nb
    prox_columns = _prox_columns_nb
    project_columns = _project_columns_nb
    _union_find_labels = _union_find_min_labels_nb
else:
    column_norms = _column_norms_np
    prox_columns = _prox_columns_np
    project_columns = _project_columns_np
    _union_find_labels = _union_find_min_labels_np


def union_find_min_labels(n, ei, ej):
    """Label nodes 0..n-1 by the smallest member of their connected component.

    Edges are given as parallel index arrays (ei, ej).
    """
    ei = np.ascontiguousarray(ei, dtype=np.int64)
    ej = np.ascontiguousarray(ej, dtype=np.int64)
    return _union_find_labels(n, ei, ej)
