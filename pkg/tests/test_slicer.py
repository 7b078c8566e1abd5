
import pytest
from hypothesis import given, settings

from islhmm.fixtures import get_fixture
from islhmm.php import desugar, parse_file, print_ast
from islhmm.php.nodes import Ast, CutCall, iter_exprs
from islhmm.slicer import SliceOptions, extract
from islhmm.translator import translate_slice
from strategies import programs

LIB = "<?php\n$t = $_GET['t'];\n"
MAIN = """<?php
include 'lib.php';
function g($p) { return h($p); }
function h($p) { return k($p); }
function k($p) { return $p . 'x'; }
function w($p) { return htmlentities($p); }
$a = g($_GET['a']);
echo $a;
$b = w($_GET['b']);
echo $b;
echo $t;
while ($i < 3) { $c = $c . $_POST['c']; $i++; }
echo $c;
"""


def slices_of(src, config, path="t.php", **kw):
    return extract(desugar(parse_file(src, path)), config, SliceOptions(**kw))


def test_fig1_slice(config):
    ex = slices_of(get_fixture("fig1").php, config)
    (s,) = ex.slices
    assert (s.lines, s.sink_class, s.entry_line, s.sink_line) == ((1, 2, 3), "sqli", 1, 3)
    assert ex.diagnostics == []


def test_fig2_slices(config):
    ex = slices_of(get_fixture("fig2").php, config)
    assert [s.lines for s in ex.slices] == [(1, 2, 3, 4), (1, 3, 5, 6)]
    then, other = ex.slices
    assert [st.role for st in then.steps] == ["stmt", "stmt", "if", "stmt"]
    assert then.steps[-1].guarded
    assert [st.role for st in other.steps] == ["stmt", "if", "else", "stmt"]
    assert not other.steps[-1].guarded
    assert then.branches == ("3:then",) and other.branches == ("3:else",)


def test_dump_format(config):
    (s,) = slices_of(get_fixture("fig1").php, config, path="fig1.php").slices
    assert s.dump().splitlines()[0] == "# slice fig1.php class=sqli entry=1 sink=3 path=0"
    assert s.dump().splitlines()[1] == "1\t$u = $_POST['username'];"


@pytest.fixture()
def project(tmp_path):
    (tmp_path / "lib.php").write_text(LIB)
    (tmp_path / "main.php").write_text(MAIN)
    return tmp_path


def test_inlining_includes_and_loops(project, config):
    p = project / "main.php"
    ex = slices_of(p.read_text(), config, path=str(p), root=project)
    assert ex.diagnostics == []
    by_sink = {s.sink_line: s for s in ex.slices}
    assert sorted(by_sink) == [8, 10, 11, 13]
    assert by_sink[8].lines == (7, 3, 4, 5, 4, 3, 7, 8)
    assert by_sink[11].lines == (2, 11)
    assert by_sink[13].notes == ("loop at line 12 traversed once",)


def test_inlining_depth_cut(project, config):
    p = project / "main.php"
    ex = slices_of(p.read_text(), config, path=str(p), root=project, inline_depth=2)
    assert ex.diagnostics == [f"{p}:4: inlining of k cut at depth 2"]
    s = next(s for s in ex.slices if s.sink_line == 8)
    assert any(isinstance(e, CutCall) for st in s.steps for e in iter_exprs(st.stmt.value) if hasattr(st.stmt, "value"))


def test_missing_include_is_reported(tmp_path, config):
    ex = slices_of("<?php\ninclude 'nothere.php';\necho $_GET['x'];\n", config, root=tmp_path)
    assert any("nothere.php" in d for d in ex.diagnostics)
    assert [s.lines for s in ex.slices] == [(3,)]


def test_path_cap(config):
    src = "<?php\n$a=$_GET['a'];\n" + "if (f($a)) { $a = $a . 'x'; }\n" * 8 + "echo $a;\n"
    ex = slices_of(src, config, path="cap.php", path_cap=64)
    assert ex.diagnostics == ["cap.php:11: more than 64 paths to this sink, keeping the first 64"]
    assert len(ex.slices) == 64


def test_class_filter(config):
    src = "<?php\n$u = $_GET['u'];\necho $u;\nmysqli_query($c, $u);\n"
    assert {s.sink_class for s in slices_of(src, config).slices} == {"xss", "sqli"}
    assert {s.sink_class for s in slices_of(src, config, classes=("sqli",)).slices} == {"sqli"}


def test_sanitized_path_still_sliced(config):
    src = "<?php\n$u = htmlentities($_GET['u']);\necho $u;\n"
    (s,) = slices_of(src, config).slices
    assert s.lines == (2, 3)


def test_unrelated_statements_are_dropped(config):
    src = "<?php\n$u = $_GET['u'];\n$z = 5;\n$w = $z . 'a';\necho $u . $w;\n"
    (s,) = slices_of(src, config).slices
    assert s.lines == (2, 5)


def test_unsupported_construct_diagnostic(config):
    ex = slices_of("<?php\nclass A {}\necho $_GET['a'];\n", config, path="u.php")
    assert ex.diagnostics == ["u.php:2: unsupported construct skipped"]


@settings(max_examples=150, deadline=None)
@given(stmts=programs)
def test_call_free_slices_follow_program_order_and_translate(stmts, config):
    src = print_ast(Ast(stmts))
    ast = desugar(parse_file(src, "p.php"))
    if ast.functions:
        return
    for s in extract(ast, config, SliceOptions(path_cap=16)).slices:
        assert list(s.lines) == sorted(s.lines)
        assert s.lines[-1] == s.sink_line
        assert s.steps[-1].role == "stmt"
        translate_slice(s, config)
