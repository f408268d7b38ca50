import numpy as np
import pytest

from multiemo import builtin_taxonomy


@pytest.fixture
def ours11():
    return builtin_taxonomy("ours11")


@pytest.fixture
def goemotions28():
    return builtin_taxonomy("goemotions28")


@pytest.fixture
def semeval11():
    return builtin_taxonomy("semeval11")


def random_instance(rng, n_max=50, l_max=11, ensure_nondegenerate=True):
    """Random (scores, gold) pair for oracle comparisons."""
    n = int(rng.integers(2, n_max + 1))
    l = int(rng.integers(2, l_max + 1))
    scores = rng.random((n, l))
    # quantize some runs to force score ties
    if rng.random() < 0.5:
        scores = np.round(scores, 1)
    gold = (rng.random((n, l)) < 0.3).astype(np.int8)
    if ensure_nondegenerate:
        if gold.sum() == 0:
            gold[0, 0] = 1
        if gold.sum() == gold.size:
            gold[0, 0] = 0
        # every row needs a positive for LRAP
        for i in range(n):
            if gold[i].sum() == 0:
                gold[i, int(rng.integers(0, l))] = 1
    return scores, gold
