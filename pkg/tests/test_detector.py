from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islhmm.detector import (
    FINAL_INDICES,
    TaintArtifacts,
    after_vit,
    before_vit,
    classify_instructions,
    classify_slice,
    decode_chained,
    decode_vit,
    display_token,
    instruction_shape,
    render_lists,
)
from islhmm.fixtures import fixture_path, get_fixture
from islhmm.isl import STATES, IslInstruction, State, Token
from islhmm.php import desugar, parse_file
from islhmm.scanner import scan_file
from islhmm.slicer import extract
from islhmm.translator import translate_program, translate_slice
from oracles import exhaustive_viterbi, random_model


def instr(text, names, assign=False, line=1):
    toks = text.split()
    pairs = [(Token.parse(t), n) for t, n in zip(toks, names.split())]
    from islhmm.isl import SourceLoc

    return IslInstruction.build(pairs, assign, SourceLoc("t.php", line))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.booleans(), st.booleans())
def test_viterbi_matches_exhaustive_search(seed, n, ties, restrict):
    rng = np.random.default_rng(seed)
    model = random_model(rng, 8, ties)
    idx = rng.integers(0, len(model.emit), size=n)
    tokens = [list(Token)[i] for i in idx]
    final = FINAL_INDICES if restrict else None
    got = decode_vit(tokens, model, final=final)
    path, score = exhaustive_viterbi(idx, model, final)
    assert tuple(s.index for s in got.states) == path
    assert got.log_prob == score


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.booleans())
def test_chained_decoding_equals_unsplit(seed, max_len, restrict):
    rng = np.random.default_rng(seed)
    model = random_model(rng, max_len)
    idx = rng.integers(0, len(model.emit), size=2 * max_len + int(rng.integers(0, 3)))
    tokens = [list(Token)[i] for i in idx]
    final = FINAL_INDICES if restrict else None
    whole = decode_vit(tokens, model, final=final)
    for chunk in range(1, len(tokens) + 1):
        split = decode_chained(tokens, model, chunk, final)
        assert split.states == whole.states
        assert np.allclose(split.scores, whole.scores, rtol=0, atol=1e-12)


def test_empty_sequence_rejected(demo_model):
    with pytest.raises(ValueError):
        decode_vit([], demo_model)
    with pytest.raises(ValueError):
        decode_chained([], demo_model)


def test_final_state_restriction(demo_model):
    res = decode_chained([Token.SANIT_F, Token.INPUT, Token.VAR], demo_model, final=FINAL_INDICES)
    assert res.states[-1] in (State.TAINT, State.N_TAINT)


def test_fig4_sequence(demo_model):
    (entry,) = get_fixture("fig4").sequences
    assert decode_chained(entry.tokens, demo_model).states == entry.states


@pytest.mark.parametrize(
    "text, shape",
    [("input var", 0), ("cond", 0), ("cond fillchk var cond", 1), ("cond ss var", 2), ("ss var", 0)],
)
def test_instruction_shape(text, shape):
    assert instruction_shape([Token.parse(t) for t in text.split()]) == shape


def test_before_vit_marks_tainted_variables(demo_model):
    art = TaintArtifacts()
    art.add("tl", "u")
    toks, rows = before_vit(instr("var var", "u q", True), art, demo_model)
    assert toks == (Token.VAR_VV, Token.VAR)
    assert rows.shape == (2, len(STATES))
    art.add("sl", "u")
    toks, _ = before_vit(instr("var var", "u q", True), art, demo_model)
    assert toks == (Token.VAR, Token.VAR)


def test_before_vit_header_fills_ctl(demo_model):
    art = TaintArtifacts()
    before_vit(instr("cond fillchk var contentchk input cond", "- - a - - -"), art, demo_model)
    assert art.ctl == {"a", "input"}


def test_strict_trigger_set(demo_model):
    ins = instr("cond fillchk var cond", "- - a -")
    art = TaintArtifacts()
    before_vit(ins, art, demo_model, strict_listing4=True)
    assert art.ctl == set()
    before_vit(ins, art, demo_model)
    assert art.ctl == {"a"}


def test_before_vit_inside_branch(demo_model):
    art = TaintArtifacts()
    art.add("tl", "u")
    art.add("tl", "w")
    art.add("ctl", "u")
    art.add("ctl", "input")
    toks, _ = before_vit(instr("cond ss var conc var conc input", "- - u - w - -"), art, demo_model)
    assert toks == (Token.COND, Token.SS, Token.VAR, Token.CONC, Token.VAR_VV, Token.CONC, Token.VAR)


def test_else_clears_ctl(demo_model):
    art = TaintArtifacts()
    art.add("ctl", "u")
    before_vit(instr("cond", "-"), art, demo_model)
    assert art.ctl == set()


def test_after_vit_updates_lists():
    art = TaintArtifacts()
    ins = instr("input var", "- u", True)
    after_vit(ins, ins.tokens, (State.TAINT, State.TAINT), art)
    assert art.tl == {"u"}
    san = instr("sanit_f var var", "- u v", True)
    art.san = True
    after_vit(san, (Token.SANIT_F, Token.VAR_VV, Token.VAR), (State.SAN, State.SAN, State.N_TAINT), art)
    assert art.sl == {"v"} and "v" not in art.tl and not art.san
    again = instr("input var", "- v", True)
    after_vit(again, again.tokens, (State.TAINT, State.TAINT), art)
    assert "v" in art.tl and "v" not in art.sl
    header = instr("cond contentchk var cond", "- - u -")
    after_vit(header, header.tokens, (State.N_TAINT, State.VAL, State.VAL, State.N_TAINT), art)
    assert art.ctl == {"u"}


def test_display_and_list_rendering():
    assert display_token(Token.VAR, State.TAINT, "u") == "var_vv_u"
    assert display_token(Token.VAR_VV, State.N_TAINT, "u") == "var_vv_u"
    assert display_token(Token.VAR, State.N_TAINT, "u") == "var"
    art = TaintArtifacts()
    for n in ("u", "q", "a"):
        art.add("tl", n)
    assert render_lists(art.snapshot(), ("TL", "CTL")) == "TL = {u, q, a}; CTL = {}"


def _slices(name, config):
    fx = get_fixture(name)
    ast = desugar(parse_file(fx.php, f"{name}.php"))
    return [translate_slice(s, config) for s in extract(ast, config).slices]


def test_fig1_decoding_table(config, demo_model):
    (s,) = _slices("fig1", config)
    d = classify_slice(s, demo_model)
    assert d.final_state is State.TAINT
    assert d.table(("TL",)) == get_fixture("fig1").table
    assert d.alert.to_dict() == {
        "file": "fig1.php",
        "entry_line": 1,
        "sink_line": 3,
        "class": "sqli",
        "lines": [1, 2, 3],
        "trace": [
            "<input,Taint> <var_vv_u,Taint>",
            "<var_vv_u,Taint> <var_vv_q,Taint>",
            "<ss,N-Taint> <var_vv_q,Taint> <var_vv_r,Taint>",
        ],
    }


def test_fig2_slices(config, demo_model):
    first, second = (classify_slice(s, demo_model) for s in _slices("fig2", config))
    assert first.final_state is State.N_TAINT and first.alert is None
    assert first.steps[2].lists["CTL"] == ("u", "a")
    assert second.final_state is State.TAINT
    assert second.steps[2].lists["CTL"] == ()
    assert second.alert.lines == (1, 3, 5, 6)


def test_fig2_program_lists(config, demo_model):
    fx = get_fixture("fig2")
    program = translate_program(desugar(parse_file(fx.php, "fig2.php")), config)
    steps, _ = classify_instructions(program, demo_model)
    rows = "".join(f"{s.instruction.loc.line}\t{render_lists(s.lists, ('TL', 'CTL'))}\n" for s in steps)
    assert rows == fx.lists


def _expected_samples():
    text = Path(str(fixture_path("samples/expected.tsv"))).read_text()
    out = {}
    for row in text.splitlines():
        name, line, cls, state = row.split("\t")
        out.setdefault(name, []).append((line, cls, state))
    return out


@pytest.mark.parametrize("name, expected", sorted(_expected_samples().items()))
def test_sample_programs(name, expected, config, demo_model):
    path = str(fixture_path(f"samples/{name}"))
    report = scan_file(path, config, demo_model)
    got = [(str(r.slice.sink_line), r.slice.sink_class, r.decoding.final_state.value) for r in report.results]
    if expected == [("-", "-", "none")]:
        expected = []
    assert sorted(got) == sorted(expected)
    assert report.errors == []


def test_artifacts_not_shared_between_slices(config, demo_model):
    slices = _slices("fig2", config)
    a = classify_slice(slices[0], demo_model)
    b = classify_slice(slices[0], demo_model)
    assert a.trace == b.trace
