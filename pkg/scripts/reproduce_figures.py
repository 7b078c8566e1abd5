"""Run the worked examples through the pipeline and diff against the fixtures.

Exits nonzero when any output differs.
"""

import argparse
import difflib

from islhmm.detector import classify_instructions, classify_slice, decode_chained, render_lists
from islhmm.fixtures import fixture_path, get_fixture
from islhmm.hmm import load_bundled_model
from islhmm.isl import load_config
from islhmm.php import desugar, parse_file
from islhmm.slicer import SliceOptions, extract
from islhmm.translator import render_isl_rows, translate_program, translate_slice


def compare(label: str, got: str, want: str, verbose: bool) -> bool:
    ok = got == want
    print(f"{'ok  ' if ok else 'DIFF'} {label}")
    if not ok or verbose:
        print("".join(difflib.unified_diff(want.splitlines(True), got.splitlines(True), "expected", "got")) or got)
    return ok


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="print outputs even when they match")
    args = ap.parse_args()

    config = load_config()
    model = load_bundled_model()
    ok = True
    for name in ("fig1", "fig2"):
        fx = get_fixture(name)
        path = str(fixture_path(f"{name}.php"))
        ast = desugar(parse_file(fx.php, path))
        program = translate_program(ast, config)
        ok &= compare(f"{name} ISL and variable map", render_isl_rows(program), fx.isl, args.verbose)
        slices = extract(ast, config, SliceOptions(root=None)).slices
        got = [(s.lines, s.sink_class, classify_slice(translate_slice(s, config), model)) for s in slices]
        want = [(e.lines, e.sink_class, e.final_state) for e in fx.slices]
        summary = "".join(f"{lines} {cls} {d.final_state.value}\n" for lines, cls, d in got)
        ok &= compare(
            f"{name} slices and classes",
            summary,
            "".join(f"{lines} {cls} {st.value}\n" for lines, cls, st in want),
            args.verbose,
        )
        if fx.table is not None:
            ok &= compare(f"{name} decoding table", got[0][2].table(("TL",)), fx.table, args.verbose)
        if fx.lists is not None:
            steps, _ = classify_instructions(program, model)
            rows = "".join(f"{s.instruction.loc.line}\t{render_lists(s.lists, ('TL', 'CTL'))}\n" for s in steps)
            ok &= compare(f"{name} artefact lists", rows, fx.lists, args.verbose)

    for entry in get_fixture("fig4").sequences:
        states = decode_chained(entry.tokens, model).states
        got = " ".join(s.value for s in states) + "\n"
        ok &= compare("fig4 decoding", got, " ".join(s.value for s in entry.states) + "\n", args.verbose)
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
