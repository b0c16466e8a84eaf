import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qconn import _kernels
from qconn.spaces import FiniteTopSpace


def _bfs_labels(balls):
    n = len(balls)
    adj = [set() for _ in range(n)]
    for x, b in enumerate(balls):
        for y in range(n):
            if b >> y & 1:
                adj[x].add(y)
                adj[y].add(x)
    out = [-1] * n
    for s in range(n):
        if out[s] >= 0:
            continue
        stack, out[s] = [s], s
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if out[v] < 0:
                    out[v] = s
                    stack.append(v)
    return out


ball_batches = st.integers(1, 9).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n).map(
            lambda row: [m | (1 << i) for i, m in enumerate(row)]
        ),
        min_size=1,
        max_size=6,
    )
)


@settings(max_examples=150, deadline=None)
@given(ball_batches)
def test_labels_match_bfs_on_both_paths(batch):
    arr = np.array(batch, dtype=np.uint64)
    expected = [_bfs_labels(row) for row in batch]
    assert _kernels.component_labels(arr).tolist() == expected
    assert _kernels.component_labels(arr, force_numpy=True).tolist() == expected


def test_labels_empty_batch():
    assert _kernels.component_labels(np.zeros((0, 3), dtype=np.uint64)).shape == (0, 3)
    assert _kernels.component_labels(np.zeros((0, 3), dtype=np.uint64), force_numpy=True).shape == (0, 3)


def test_labels_high_bit():
    n = 64
    balls = np.array([[(1 << x) | (1 << ((x + 1) % n)) for x in range(n)]], dtype=np.uint64)
    assert _kernels.component_labels(balls).tolist() == [[0] * n]
    assert _kernels.component_labels(balls, force_numpy=True).tolist() == [[0] * n]


def _random_nbhd(n, rng):
    reach = [[i == j or rng.random() < 0.3 for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    reach[i][j] |= reach[k][j]
    return FiniteTopSpace.from_preorder([str(i) for i in range(n)], reach)


@pytest.mark.parametrize("seed", range(12))
def test_clopen_scan_parity(seed):
    import random

    T = _random_nbhd(random.Random(seed).randint(1, 10), random.Random(seed))
    nb = np.array(T.nbhd, dtype=np.uint64)
    a = sorted(_kernels.clopen_masks(nb).tolist())
    b = sorted(_kernels.clopen_masks(nb, force_numpy=True).tolist())
    fam = set(T.opens)
    truth = sorted(A for A in T.opens if T.full & ~A in fam)
    assert a == b == truth
    assert _kernels.has_nontrivial_clopen(nb) == _kernels.has_nontrivial_clopen(nb, force_numpy=True) == (len(truth) > 2)


def test_scan_limit():
    with pytest.raises(ValueError):
        _kernels.clopen_masks(np.arange(30, dtype=np.uint64))


def test_env_flag_disables_numba():
    env = dict(os.environ, QCONN_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from qconn import _kernels; print(_kernels.USE_NUMBA)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "False"


def test_fallback_gives_identical_reports():
    argv = [sys.executable, "-m", "qconn", "verify", "--theorem", "component-properties", "--corpus", "exhaustive:3"]
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, QCONN_DISABLE_NUMBA=flag)
        outs.append(subprocess.run(argv, env=env, capture_output=True, check=True).stdout)
    assert outs[0] == outs[1]
