import pytest
from hypothesis import given, settings

from islhmm.php import PhpSyntaxError, desugar, parse_expression, parse_file, print_ast, print_expr
from islhmm.php.desugar import is_desugared
from islhmm.php.nodes import (
    Assign,
    Ast,
    BinOp,
    Call,
    Concat,
    If,
    Index,
    Lit,
    Loop,
    Opaque,
    Superglobal,
    Var,
    base_name,
)
from strategies import exprs, programs


@settings(max_examples=200, deadline=None)
@given(programs)
def test_print_parse_roundtrip(stmts):
    ast = Ast(stmts)
    assert parse_file(print_ast(ast)).statements == stmts


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_expression_roundtrip(e):
    assert parse_expression(print_expr(e)) == e


@settings(max_examples=100, deadline=None)
@given(programs)
def test_desugar_is_normal_form(stmts):
    once = desugar(Ast(stmts))
    assert is_desugared(once)
    assert desugar(once).statements == once.statements


def test_superglobal_and_index():
    e = parse_expression("$_POST['name']")
    assert e == Superglobal("_POST", Lit("name"))
    assert parse_expression("$row['a']['b']") == Index(Index(Var("row"), Lit("a")), Lit("b"))
    assert base_name(parse_expression("$row['a']->b")) == "row"
    assert base_name(parse_expression("f($a)")) is None


def test_interpolation_and_compound_ops():
    ast = desugar(parse_file('<?php $a = "x $u y";\n$b .= $a;\n'))
    a, b = ast.statements
    assert a.value == Concat((Lit("x "), Var("u"), Lit(" y")))
    assert b == Assign(Var("b"), "=", Concat((Var("b"), Var("a"))))


def test_ternary_and_nested_assignment_are_hoisted():
    ast = desugar(parse_file("<?php $u = (isset($_POST['n'])) ? $u = $_POST['n'] : '';\n$x = $y = $_GET['q'];\n"))
    u, y, x = ast.statements
    assert u.value == Concat((Superglobal("_POST", Lit("n")), Lit("")))
    assert y == Assign(Var("y"), "=", Superglobal("_GET", Lit("q")))
    assert x == Assign(Var("x"), "=", Var("y"))


def test_elseif_becomes_nested_if():
    ast = desugar(parse_file("<?php if ($a) { echo 1; } elseif ($b) { echo 2; } else { echo 3; }\n"))
    (top,) = ast.statements
    assert isinstance(top, If) and not top.elifs
    assert isinstance(top.orelse[0], If)


def test_loops_are_flattened():
    src = "<?php for ($i = 0; $i < 3; $i++) { $s = $s . $i; }\nforeach ($arr as $k => $v) { echo $v; }\n"
    ast = desugar(parse_file(src))
    assert isinstance(ast.statements[0], Assign)
    assert [type(s) for s in ast.statements[1:]] == [Loop, Loop]
    assert ast.statements[2].body[1] == Assign(Var("v"), "=", Var("arr"))


def test_line_numbers():
    ast = parse_file("<?php\n$a = 1;\n\n$b = f($a,\n  2);\n")
    assert [s.line for s in ast.statements] == [2, 4]


def test_functions_are_collected_and_unsupported_code_is_opaque():
    ast = parse_file("<?php function f($p) { return $p; }\nclass A {}\n$x = f(1);\n")
    assert "f" in ast.functions
    assert any(isinstance(s, Opaque) for s in ast.statements)
    assert isinstance(ast.statements[-1].value, Call)


def test_syntax_error_position():
    with pytest.raises(PhpSyntaxError) as info:
        parse_file("<?php\n$a = ;\n", "e.php")
    assert info.value.line == 2
    assert str(info.value).startswith("e.php:2:")


def test_operator_precedence():
    e = parse_expression("$a . $b + $c && $d")
    assert isinstance(e, BinOp) and e.op == "&&"
