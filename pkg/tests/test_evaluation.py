import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islhmm.evaluation import (
    ConfusionMatrix,
    fmt_metric,
    fold_assignment,
    kfold,
    metrics,
    score_predictions,
)
from islhmm.fixtures import fixture_text
from islhmm.hmm import load_corpus
from islhmm.isl import State

T, N = State.TAINT, State.N_TAINT


def test_metrics_by_hand():
    m = metrics(ConfusionMatrix(tp=3, fp=1, fn=2, tn=4))
    assert m == {"acc": 0.7, "pr": 0.75, "fpr": 0.2, "fnr": 0.4}


def test_undefined_metrics_are_none():
    m = metrics(ConfusionMatrix(tn=5))
    assert m["pr"] is None and m["fnr"] is None
    assert m["acc"] == 1.0 and m["fpr"] == 0.0
    assert fmt_metric(None) == "n/a"
    assert all(v is None for v in metrics(ConfusionMatrix()).values())


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1)


def test_score_predictions():
    cm = score_predictions([T, T, N, N], [T, N, T, N])
    assert cm == ConfusionMatrix(1, 1, 1, 1)
    with pytest.raises(ValueError):
        score_predictions([T], [])


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n), st.integers(0, 10**6))))
def test_folds_partition_the_corpus(args):
    n, k, seed = args
    folds = fold_assignment(n, k, seed)
    assert len(folds) == k
    flat = sorted(i for f in folds for i in f)
    assert flat == list(range(n))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    assert folds == fold_assignment(n, k, seed)


@pytest.mark.parametrize("n, k, msg", [(24, 1, "at least 2"), (24, 25, "larger than the corpus")])
def test_bad_k(n, k, msg):
    with pytest.raises(ValueError, match=msg):
        fold_assignment(n, k, 0)


def test_kfold_is_deterministic_and_complete():
    corpus = load_corpus(fixture_text("listing3.corpus"))
    a = kfold(corpus, 4, seed=7)
    b = kfold(corpus, 4, seed=7)
    assert a.to_json() == b.to_json()
    assert a.aggregate.n == len(corpus) == a.size
    d = json.loads(a.to_json())
    assert [f["fold"] for f in d["folds"]] == [0, 1, 2, 3]
    assert sum(f["size"] for f in d["folds"]) == 24
    assert "aggregate" in a.to_text()


def test_kfold_text_marks_undefined():
    # The small corpus has only four Taint-ending entries, so with twelve
    # folds some contain no positives and fnr is undefined there.
    corpus = load_corpus(fixture_text("listing3.corpus"))
    cv = kfold(corpus, 12, seed=0)
    rows = [f for f in cv.to_dict()["folds"] if f["tp"] + f["fn"] == 0]
    assert rows and all(r["fnr"] is None for r in rows)
    assert "n/a" in cv.to_text()
