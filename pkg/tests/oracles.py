"""Independent reference implementations used as test oracles."""

import itertools
from fractions import Fraction

import numpy as np


def exhaustive_viterbi(token_idx, model, final=None):
    """Score every state path and return the best one.

    Scores are accumulated in the same left-to-right order as the dynamic
    program, so equal paths get bitwise equal scores. Among equal best paths
    the winner is the smallest when compared from the last state backwards,
    which is what lowest-index tie-breaking during backtracking produces.
    """
    n = len(token_idx)
    k = model.start.shape[0]
    paths = np.array(list(itertools.product(range(k), repeat=n)))
    ls, lt, le = np.log(model.start), np.log(model.trans), np.log(model.emit)
    score = ls[paths[:, 0]] + le[token_idx[0], paths[:, 0]]
    for i in range(1, n):
        score = score + lt[paths[:, i], paths[:, i - 1]]
        score = score + le[token_idx[i], paths[:, i]]
    allowed = np.ones(len(paths), bool) if final is None else np.isin(paths[:, -1], list(final))
    best = score[allowed].max()
    cand = np.flatnonzero(allowed & (score == best))
    order = np.lexsort(tuple(paths[cand, j] for j in range(n)))
    win = cand[order[0]]
    return tuple(int(s) for s in paths[win]), float(best)


def random_model(rng, max_len, ties=False):
    from islhmm.hmm import HmmModel
    from islhmm.isl import N_STATES, N_TOKENS

    def stochastic(rows, cols):
        m = rng.uniform(0.05, 1.0, size=(rows, cols))
        if ties and cols > 1:
            m[:, 1] = m[:, 0]
        return m / m.sum(axis=0, keepdims=True)

    start = stochastic(N_STATES, 1)[:, 0]
    trans = stochastic(N_STATES, N_STATES)
    if ties:
        trans[1] = trans[0]
        trans = trans / trans.sum(axis=0, keepdims=True)
    return HmmModel(start, trans, stochastic(N_TOKENS, N_STATES), max_len)


def brute_force(entries):
    """Add-one estimates from plain nested loops over the raw pair lists."""
    length = max(len(e) for e in entries)
    seqs = [list(e) + [("miss", e[-1][1])] * (length - len(e)) for e in entries]
    from islhmm.isl import STATES, TOKENS

    sn = [s.value for s in STATES]
    tn = [t.value for t in TOKENS]
    start = []
    for s in sn:
        c = sum(1 for q in seqs if q[0][1] == s)
        start.append(Fraction(c + 1, len(seqs) + len(sn)))
    trans = [[None] * len(sn) for _ in sn]
    for i, a in enumerate(sn):
        total = sum(1 for q in seqs for x, y in zip(q, q[1:]) if x[1] == a)
        for k, b in enumerate(sn):
            c = sum(1 for q in seqs for x, y in zip(q, q[1:]) if x[1] == a and y[1] == b)
            trans[k][i] = Fraction(c + 1, total + len(sn))
    emit = [[None] * len(sn) for _ in tn]
    for i, s in enumerate(sn):
        total = sum(1 for q in seqs for p in q if p[1] == s)
        for t, tok in enumerate(tn):
            c = sum(1 for q in seqs for p in q if p == (tok, s))
            emit[t][i] = Fraction(c + 1, total + len(tn))
    return start, trans, emit
