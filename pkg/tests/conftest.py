import random

from wehler import EXACT_CTX, apply_word, reduce_to_chamber, vector


def make_rng(seed):
    return random.Random(seed)


def random_nef(rng, n, lo=0, hi=6, max_zeros=1):
    """Random integer nef class with at most max_zeros zero coordinates."""
    while True:
        coords = [rng.randint(lo, hi) for _ in range(n + 1)]
        if sum(1 for c in coords if c == 0) <= max_zeros:
            return vector(n, coords, EXACT_CTX)


def random_ample(rng, n, lo=1, hi=6):
    return vector(n, [rng.randint(lo, hi) for _ in range(n + 1)], EXACT_CTX)


def random_reduced_word(rng, n, length):
    """Uniform reduced word: no two adjacent equal letters."""
    out = []
    for _ in range(length):
        choices = [i for i in range(n + 1) if not out or i != out[-1]]
        out.append(rng.choice(choices))
    return tuple(out)


def random_tits_point(rng, n, depth, lo=1, hi=6):
    """Random chamber point pushed out by a random reduced word."""
    start = random_ample(rng, n, lo, hi)
    word = random_reduced_word(rng, n, depth)
    moved = apply_word(word, start)
    return moved, start, word


def assert_reduces_back(moved, start):
    res = reduce_to_chamber(moved)
    assert res.reduced.coords == start.coords
