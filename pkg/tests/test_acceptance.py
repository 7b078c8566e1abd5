"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import io
import time
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest

from islhmm.cli import main
from islhmm.detector import FINAL_INDICES, classify_instructions, decode_chained, decode_vit, render_lists
from islhmm.evaluation import ConfusionMatrix, metrics
from islhmm.fixtures import fixture_path, fixture_text, get_fixture
from islhmm.hmm import CorpusError, load_corpus, load_model, save_model, train
from islhmm.isl import STATES, TOKENS, can_emit
from islhmm.php import desugar, parse_file
from islhmm.scanner import scan_file
from islhmm.translator import render_isl_rows, translate_program
from oracles import brute_force, exhaustive_viterbi, random_model

FIXTURES = Path(str(fixture_path("")))


@pytest.fixture
def verdict(capsys, request):
    """Call with (ok, detail); prints the line and fails the test if not ok."""

    def check(ok, detail=""):
        label = request.node.name.removeprefix("test_")
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else ""))
        assert ok, detail

    return check


def test_c1_fig1_end_to_end(config, demo_model, verdict):
    fx = get_fixture("fig1")
    report = scan_file(str(FIXTURES / "fig1.php"), config, demo_model)
    (result,) = report.results
    d = result.decoding
    isl = render_isl_rows([s.instruction for s in d.steps])
    table = d.table(("TL",))
    tl = [s.lists["TL"] for s in d.steps]
    ok = (
        isl == fx.isl
        and table == fx.table
        and tl == [("u",), ("u", "q"), ("u", "q", "r")]
        and d.final_state.value == "Taint"
        and d.alert is not None
        and d.alert.trace == tuple(row.split("\t")[4] for row in fx.table.splitlines())
    )
    verdict(ok, f"final {d.final_state.value}, TL {tl}")


def test_c2_fig2_end_to_end(config, demo_model, verdict):
    fx = get_fixture("fig2")
    report = scan_file(str(FIXTURES / "fig2.php"), config, demo_model)
    got = [(r.slice.lines, r.decoding.final_state.value) for r in report.results]
    want = [(s.lines, s.final_state.value) for s in fx.slices]
    first, second = (r.decoding for r in report.results)
    after3 = first.steps[2].lists["CTL"]
    at_else = second.steps[2]
    program = translate_program(desugar(parse_file(fx.php, "fig2.php")), config)
    steps, _ = classify_instructions(program, demo_model)
    lists = "".join(f"{s.instruction.loc.line}\t{render_lists(s.lists, ('TL', 'CTL'))}\n" for s in steps)
    ok = (
        got == want
        and want == [((1, 2, 3, 4), "N-Taint"), ((1, 3, 5, 6), "Taint")]
        and after3 == ("u", "a")
        and at_else.instruction.is_else
        and at_else.lists["CTL"] == ()
        and render_isl_rows(program) == fx.isl
        and lists == fx.lists
    )
    verdict(ok, f"slices {got}")


def test_c3_fig4_decoding(demo_model, verdict):
    (entry,) = get_fixture("fig4").sequences
    states = decode_chained(entry.tokens, demo_model).states
    verdict(states == entry.states, " ".join(s.value for s in states))


def _random_corpora(rng, count):
    valid = [(t, s) for s in STATES for t in TOKENS if can_emit(s, t) and t.value != "miss"]
    finals = [(t, s) for t, s in valid if s.value in ("Taint", "N-Taint")]
    out = []
    for _ in range(count):
        lines = []
        for _ in range(int(rng.integers(1, 11))):
            n = int(rng.integers(0, 7))
            pairs = [valid[i] for i in rng.integers(0, len(valid), size=n)]
            pairs.append(finals[int(rng.integers(0, len(finals)))])
            lines.append(" ".join(f"<{t.value},{s.value}>" for t, s in pairs))
        out.append(load_corpus("\n".join(lines)))
    return out


def test_c4_trainer_oracle(verdict):
    rng = np.random.default_rng(4)
    corpora = _random_corpora(rng, 300)
    bad, slowest = 0, 0.0
    for c in corpora:
        t0 = time.perf_counter()
        m = train(c)
        slowest = max(slowest, time.perf_counter() - t0)
        raw = [[(t.value, s.value) for t, s in e.pairs] for e in c.entries]
        start, trans, emit = brute_force(raw)
        same = (
            m.start.tolist() == [float(x) for x in start]
            and m.trans.tolist() == [[float(x) for x in r] for r in trans]
            and m.emit.tolist() == [[float(x) for x in r] for r in emit]
        )
        stochastic = all(
            np.all(np.abs(a.sum(axis=0) - 1) <= 1e-9) and a.min() > 0
            for a in (m.start[:, None], m.trans, m.emit)
        )
        bad += not (same and stochastic)
    verdict(bad == 0 and slowest < 1.0, f"{len(corpora)} corpora, {bad} mismatches, slowest {slowest * 1e3:.2f} ms")


def test_c5_viterbi_oracle(verdict):
    rng = np.random.default_rng(5)
    agree = 0
    t0 = time.perf_counter()
    for case in range(1000):
        model = random_model(rng, 8, ties=case % 4 == 0)
        n = int(rng.integers(1, 7))
        idx = rng.integers(0, len(TOKENS), size=n)
        final = FINAL_INDICES if case % 2 else None
        got = decode_vit([TOKENS[i] for i in idx], model, final=final)
        path, _ = exhaustive_viterbi(idx, model, final)
        agree += tuple(s.index for s in got.states) == path
    elapsed = time.perf_counter() - t0
    verdict(agree == 1000 and elapsed < 10, f"{agree}/1000 agree in {elapsed:.2f} s")


def test_c6_chained_decoding(verdict):
    rng = np.random.default_rng(6)
    bad, worst = 0, 0.0
    for case in range(100):
        max_len = int(rng.integers(1, 9))
        model = random_model(rng, max_len)
        idx = rng.integers(0, len(TOKENS), size=2 * max_len)
        tokens = [TOKENS[i] for i in idx]
        whole = decode_vit(tokens, model, final=FINAL_INDICES)
        split = decode_chained(tokens, model, max_len, FINAL_INDICES)
        diff = float(np.max(np.abs(whole.scores - split.scores)))
        worst = max(worst, diff)
        bad += split.states != whole.states or diff > 1e-12
    verdict(bad == 0, f"100 sequences, {bad} differ, max score gap {worst:.1e}")


def test_c7_metrics_arithmetic(verdict):
    ev = metrics(ConfusionMatrix(tp=405, fp=14, fn=9, tn=82))
    de = metrics(ConfusionMatrix(tp=412, fp=16, fn=2, tn=80))
    ok = (
        abs(ev["acc"] - 0.95) <= 0.01
        and abs(ev["pr"] - 0.97) <= 0.01
        and abs(ev["fpr"] - 0.15) <= 0.01
        and abs(ev["fnr"] - 0.02) <= 0.005
        and abs(de["pr"] - 0.96) <= 0.01
        and abs(de["fnr"] - 0.005) <= 0.003
    )
    shown = ", ".join(f"{k} {v:.3f}" for k, v in ev.items())
    verdict(ok, f"evaluation {shown}; decoding pr {de['pr']:.3f}, fnr {de['fnr']:.3f}")


def test_c8_corpus_pipeline(verdict):
    text = fixture_text("listing3.corpus")
    corpus = load_corpus(text + text.splitlines()[0] + "\n")
    padded = corpus.padded()
    model_text = save_model(train(corpus))
    roundtrip = save_model(load_model(model_text)) == model_text
    n_lines = len(text.splitlines())
    rejected = total = 0
    for s in STATES:
        for t in TOKENS:
            if can_emit(s, t):
                continue
            total += 1
            bad = f"<{t.value},{s.value}> <var,N-Taint>"
            try:
                load_corpus(text + bad + "\n")
            except CorpusError as e:
                rejected += e.line == n_lines + 1
    ok = (
        len(corpus) == 24
        and all(len(e.pairs) == corpus.max_len for e in padded)
        and roundtrip
        and total > 0
        and rejected == total
    )
    verdict(ok, f"24 entries after dedup, {rejected}/{total} invalid pairs rejected with line number")


def _scan_json(*extra):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["scan", "--format", "json", *extra, str(FIXTURES)])
    return code, buf.getvalue()


def test_c9_scan_determinism(verdict):
    code_a, a = _scan_json()
    code_b, b = _scan_json("--jobs", "3")
    code_c, c = _scan_json()
    ok = a == b == c and code_a == code_b == code_c and a.count('"entry_line"') > 0
    verdict(ok, f"{len(a)} bytes, exit {code_a}")
