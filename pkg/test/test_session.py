#!/usr/bin/env python3
"""
Tests for script execution, transcripts and the interactive session
"""

import os
import sys
import traceback
from pathlib import Path

# Add the parent directory to the path so we can import src modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.part_1_abstract_tensor_algebra.tensor_context import Context
from src.part_1_abstract_tensor_algebra.tensor_expression_renderer import RenderOptions
from src.session.script_session import Session, repl_step, run_script
from src.session.script_statements import StatementKind, parse_script

SCRIPTS = Path(__file__).parent.parent / "assets" / "scripts"

PARTIALS = ("\\partial_{\\alpha}{F_{\\beta \\gamma}} - \\partial_{\\beta}{F_{\\alpha \\gamma}}"
            " + \\partial_{\\gamma}{F_{\\alpha \\beta}}")
DIVERGENCE = ("riman:= 1/\\sqrt{-g} \\partial_{\\alpha}{\\sqrt{-g} h^{\\alpha \\beta}}"
              " = 4 j^{\\beta} \\pi/c;")
DIVERGENCE_FH = ("riman:= 1/\\sqrt{-g} \\partial_{\\alpha}{\\sqrt{-g} g^{\\alpha \\gamma} g^{\\beta \\delta}"
                 " f_{\\gamma \\delta}} = 4 j^{\\beta} \\pi/c;")

INDICES = "{\\alpha,\\beta}::Indices(vector).\n"
WIDE = Session(render=RenderOptions(width=200))


def script(name: str) -> str:
    return (SCRIPTS / name).read_text(encoding="utf-8")


def test_statement_classification():
    statements = parse_script(script("maxwell_bianchi.cdb"))
    kinds = [statement.kind for statement in statements]
    assert kinds[:5] == [StatementKind.DECLARATION] * 5
    assert kinds[5] is StatementKind.RULE
    assert kinds[6] is StatementKind.ASSIGNMENT
    assert kinds[7:] == [StatementKind.ALGORITHM] * 3
    assert [s.head for s in statements[7:]] == ["substitute", "canonicalize", "collect_terms"]
    assert statements[7].label == "maxwell1" and statements[7].rule == "nabla"
    assert statements[0].line == 2
    print("✓ Statement classification tests passed")


def test_bianchi_script():
    transcript = run_script(script("maxwell_bianchi.cdb"), WIDE)
    assert transcript.status == 0, transcript.error
    assert len(transcript.outputs) == 5
    assert transcript.outputs[0].startswith("nabla:= ")
    assert transcript.outputs[-1] == f"maxwell1:= {PARTIALS};"

    # the default width of 80 breaks before the second term
    wrapped = run_script(script("maxwell_bianchi.cdb")).outputs[-1]
    assert wrapped == f"maxwell1:= {PARTIALS[:35]}\n{PARTIALS[36:]};"
    print("✓ Bianchi script tests passed")


def test_divergence_script():
    transcript = run_script(script("maxwell_divergence.cdb"), WIDE)
    assert transcript.status == 0, transcript.error
    assert transcript.outputs[2] == DIVERGENCE
    assert transcript.outputs[-1] == DIVERGENCE_FH

    narrow = run_script(script("maxwell_divergence.cdb"))
    for output, golden in ((narrow.outputs[2], DIVERGENCE), (narrow.outputs[-1], DIVERGENCE_FH)):
        lines = output.split("\n")
        assert len(lines) > 1 and all(len(line) <= 80 for line in lines)
        assert " ".join(lines) == golden
    print("✓ Divergence script tests passed")


def test_latex_transcript():
    session = Session(render=RenderOptions(format="latex"))
    transcript = run_script(script("maxwell_bianchi.cdb"), session)
    assert transcript.status == 0
    assert "\\rightarrow" in transcript.outputs[0]
    print("✓ LaTeX transcript tests passed")


def test_empty_script():
    transcript = run_script("")
    assert transcript.status == 0
    assert transcript.entries == ()
    assert transcript.text() == ""
    comments_only = run_script("# nothing to do\n\n")
    assert comments_only.status == 0 and comments_only.outputs == []
    print("✓ Empty script tests passed")


def test_parse_errors_carry_location():
    unbalanced = run_script(INDICES + "bad:= A_{\\alpha}};\n")
    assert unbalanced.status == 1
    assert (unbalanced.line, unbalanced.column) == (2, 17)

    dangling = run_script(INDICES + "x:= A_{\\alpha};\nbad:= A_{\\alpha} + ;\n")
    assert dangling.status == 1
    assert dangling.line == 3
    assert dangling.statement_index == 3
    assert len(dangling.outputs) == 1

    unterminated = run_script(INDICES + "x:= A_{\\alpha}")
    assert unterminated.status == 1 and unterminated.line == 2
    print("✓ Parse error location tests passed")


def test_evaluation_errors_carry_statement_index():
    missing = run_script(INDICES + "@canonicalise!(nothing);\n")
    assert missing.status == 2
    assert missing.statement_index == 2
    assert "statement 2" in missing.error

    undeclared = run_script("x:= A_{\\mu};")
    assert undeclared.status == 2

    narrow = run_script("Format 10;")
    assert narrow.status == 2
    assert "Format" in narrow.error

    early = run_script("@collect_terms!(%);")
    assert early.status == 2
    print("✓ Evaluation error tests passed")


def test_substitute_without_match_leaves_note():
    source = INDICES + "r1:= B_{\\alpha} -> C_{\\alpha};\nx:= A_{\\alpha};\n@substitute!(x)(@(r1));\n"
    transcript = run_script(source)
    assert transcript.status == 0
    assert "rule 'r1' did not match 'x'" in transcript.notes
    assert transcript.outputs[-1] == transcript.outputs[-2]
    print("✓ Substitution note tests passed")


def test_form_pending_statements_flush_at_end():
    transcript = run_script("Symbols a;\nLocal F = a + a;\nPrint;\n")
    assert transcript.status == 0
    assert transcript.outputs == ["F =\n   2*a;"]
    silent = run_script("Symbols a;\nLocal F = a;\n.sort\n")
    assert silent.outputs == []
    print("✓ FORM module flush tests passed")


def test_end_stops_execution():
    transcript = run_script("Symbols a;\nLocal F = a;\nPrint;\n.end\nLocal G = a;\nPrint;\n.end\n")
    assert transcript.status == 0
    assert transcript.outputs == ["F =\n   a;"]
    print("✓ .end tests passed")


def test_repl_matches_batch():
    """Feeding a script line by line gives the batch outputs in the same order."""
    source = script("maxwell_bianchi.cdb")
    session = Session()
    outputs = []
    for line in source.splitlines():
        session, output = repl_step(session, line)
        if output:
            outputs.append(output)
    assert session.buffer.strip() == ""
    assert outputs == run_script(source).outputs
    print("✓ REPL equivalence tests passed")


def test_repl_buffering_and_meta_commands():
    session, output = repl_step(Session(), INDICES.strip())
    assert output == ""
    session, output = repl_step(session, "x:= A_{\\alpha} +")
    assert output == "" and session.buffer
    session, output = repl_step(session, "  B_{\\alpha};")
    assert output.startswith("x:= ") and session.buffer == ""

    session, shown = repl_step(session, ":show x")
    assert shown == output
    session, described = repl_step(session, ":ctx")
    assert "dimension: 4" in described
    assert "expressions: x" in described
    _, unknown = repl_step(session, ":frobnicate")
    assert unknown.startswith("error:")

    session, quitting = repl_step(session, ":quit")
    assert session.finished and quitting == ""
    print("✓ REPL buffering and meta command tests passed")


def test_repl_error_keeps_state():
    session, _ = repl_step(Session(), INDICES.strip())
    session, _ = repl_step(session, "x:= A_{\\alpha};")
    after, output = repl_step(session, "@canonicalise!(nothing);")
    assert output.startswith("error:")
    assert after is session
    after, output = repl_step(session, "y:= A_{\\alpha} + ;")
    assert output.startswith("error:")
    assert after is session
    assert "y" not in after.ctx.named_exprs
    print("✓ REPL error recovery tests passed")


def test_dimension_is_configurable():
    source = "Indices i, j, k;\nLocal T = e_(i,j,k) * e_(i,j,k);\ncontract;\nPrint;\n.end\n"
    transcript = run_script(source, Session(ctx=Context(dimension=3)))
    assert transcript.status == 0, transcript.error
    assert transcript.outputs == ["T =\n   6;"]
    assert run_script("Dimension 3;\n" + source).outputs == ["T =\n   6;"]
    print("✓ Dimension tests passed")


def main():
    """Run all session tests."""
    print("=" * 60)
    print("SESSION TESTS - SCRIPTS AND REPL")
    print("=" * 60)

    tests = [
        test_statement_classification,
        test_bianchi_script,
        test_divergence_script,
        test_latex_transcript,
        test_empty_script,
        test_parse_errors_carry_location,
        test_evaluation_errors_carry_statement_index,
        test_substitute_without_match_leaves_note,
        test_form_pending_statements_flush_at_end,
        test_end_stops_execution,
        test_repl_matches_batch,
        test_repl_buffering_and_meta_commands,
        test_repl_error_keeps_state,
        test_dimension_is_configurable,
    ]

    passed = 0
    total = len(tests)

    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ {test.__name__} failed: {e}")
            traceback.print_exc()

    print("\n" + "=" * 60)
    print(f"TEST RESULTS: {passed}/{total} tests passed")
    print("=" * 60)

    return passed == total


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
