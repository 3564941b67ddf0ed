from unittest import TestCase

from hypothesis import given, strategies as st

from .. import constraints
from ..parser import parse_strategy, structure_indicator
from ..types import FailureReason


MISSING_OPEN = FailureReason.MISSING_OPEN
IMPROPER_NESTING = FailureReason.IMPROPER_NESTING
MISSING_CLOSE = FailureReason.MISSING_CLOSE
MULTIPLE_BLOCKS = FailureReason.MULTIPLE_BLOCKS
EMPTY_BODY = FailureReason.EMPTY_BODY
OVER_BUDGET = FailureReason.OVER_BUDGET


TRUTH_TABLE = [
    # (text, budget, expected failure reason, expected body)

    # Well-formed
    ("<strategy>use set intersection</strategy>", 1024,
     None, "use set intersection"),
    ("<think>plan</think><strategy>sort then scan</strategy>", 1024,
     None, "sort then scan"),
    ("<strategy>check parity</strategy><think>after</think>", 1024,
     None, "check parity"),
    ("preamble <strategy>x</strategy> trailing prose", 1024, None, "x"),
    ("<strategy>\n  1. read input\n  2. count\n</strategy>", 1024,
     None, "1. read input\n  2. count"),
    ("<strategy>one two three</strategy>", 3, None, "one two three"),
    ("<strategy>a</strategy>", 1, None, "a"),
    ("<think>a</think><think>b</think><strategy>c</strategy>", 1024,
     None, "c"),
    ("<think>unclosed reasoning <strategy>x</strategy>", 1024,
     IMPROPER_NESTING, None),
    ("<strategy>x</strategy><think>never closed", 1024, None, "x"),
    ("</think><strategy>stray think close</strategy>", 1024,
     None, "stray think close"),
    ("<strategy>use <b>bold</b> markup</strategy>", 1024,
     None, "use <b>bold</b> markup"),
    ("<strategy>compare a < b and b > c</strategy>", 1024,
     None, "compare a < b and b > c"),
    ("<strategy>übersetzen und prüfen</strategy>", 1024,
     None, "übersetzen und prüfen"),

    # missing_open
    ("", 1024, MISSING_OPEN, None),
    ("just a plan with no tags", 1024, MISSING_OPEN, None),
    ("no opening tag</strategy>", 1024, MISSING_OPEN, None),
    ("<think>only thinking</think>", 1024, MISSING_OPEN, None),
    ("<Strategy>wrong case</Strategy>", 1024, MISSING_OPEN, None),
    ("<STRATEGY>upper</STRATEGY>", 1024, MISSING_OPEN, None),
    ("<strategy id=1>attributes</strategy>", 1024, MISSING_OPEN, None),
    ("< strategy>spaced</strategy>", 1024, MISSING_OPEN, None),
    ("<strategies>plural</strategies>", 1024, MISSING_OPEN, None),

    # improper_nesting
    ("<strategy>a<strategy>b</strategy></strategy>", 1024,
     IMPROPER_NESTING, None),
    ("</strategy><strategy>x</strategy>", 1024, IMPROPER_NESTING, None),
    ("<strategy>x</strategy></strategy>", 1024, IMPROPER_NESTING, None),
    ("<strategy>a<think>b</think>c</strategy>", 1024,
     IMPROPER_NESTING, None),
    ("<think>a<strategy>b</strategy>c</think>", 1024,
     IMPROPER_NESTING, None),
    ("<strategy>a<think>b</strategy></think>", 1024,
     IMPROPER_NESTING, None),
    ("<think>a<strategy>b</think></strategy>", 1024,
     IMPROPER_NESTING, None),
    ("<strategy>a</think></strategy>", 1024, IMPROPER_NESTING, None),
    ("<strategy><strategy>x", 1024, IMPROPER_NESTING, None),

    # missing_close
    ("<strategy>no closing tag", 1024, MISSING_CLOSE, None),
    ("<think>plan</think><strategy>unterminated", 1024,
     MISSING_CLOSE, None),
    ("<strategy>first</strategy><strategy>second", 1024,
     MISSING_CLOSE, None),
    ("<strategy>almost</strateg>", 1024, MISSING_CLOSE, None),
    ("<strategy>wrong case close</Strategy>", 1024, MISSING_CLOSE, None),

    # multiple_blocks
    ("<strategy>a</strategy><strategy>b</strategy>", 1024,
     MULTIPLE_BLOCKS, None),
    ("<strategy>a</strategy> and <strategy>a</strategy>", 1024,
     MULTIPLE_BLOCKS, None),
    ("<strategy></strategy><strategy>b</strategy>", 1024,
     MULTIPLE_BLOCKS, None),
    ("<strategy>a</strategy><think>t</think><strategy>b</strategy>", 1024,
     MULTIPLE_BLOCKS, None),

    # empty_body
    ("<think>plan</think><strategy>  </strategy>", 1024, EMPTY_BODY, ""),
    ("<strategy></strategy>", 1024, EMPTY_BODY, ""),
    ("<strategy>\n\t\n</strategy>", 1024, EMPTY_BODY, ""),
    ("<strategy> </strategy>", 1024, EMPTY_BODY, ""),

    # over_budget
    ("<strategy>one two three four</strategy>", 3,
     OVER_BUDGET, "one two three four"),
    ("<strategy>a b</strategy>", 1, OVER_BUDGET, "a b"),
    ("<think>long</think><strategy>" + " ".join(["w"] * 11)
     + "</strategy>", 10, OVER_BUDGET, " ".join(["w"] * 11)),
]


class TruthTableTestCase(TestCase):

    def test_covers_every_failure_reason(self):
        self.assertGreaterEqual(len(TRUTH_TABLE), 40)
        reasons = {reason for _, _, reason, _ in TRUTH_TABLE}
        self.assertEqual(reasons - {None}, set(FailureReason))

    def test_truth_table(self):
        for text, budget, reason, body in TRUTH_TABLE:
            with self.subTest(text=text, budget=budget):
                parsed = parse_strategy(text, budget)
                self.assertEqual(parsed.failure_reason, reason)
                self.assertEqual(parsed.valid, reason is None)
                self.assertEqual(parsed.strategy_body, body)
                self.assertEqual(
                    structure_indicator(text, budget),
                    1 if reason is None else 0)


class ParseStrategyTestCase(TestCase):

    def test_minimal_well_formed(self):
        parsed = parse_strategy(
            "<strategy>use set intersection</strategy>", 1024)
        self.assertTrue(parsed.valid)
        self.assertEqual(parsed.token_count, 3)
        self.assertIsNone(parsed.think_body)

    def test_think_body_extracted(self):
        parsed = parse_strategy(
            "<think> weigh options </think><strategy>go</strategy>", 1024)
        self.assertEqual(parsed.think_body, "weigh options")

    def test_budget_boundary(self):
        body = " ".join(["tok"] * 8)
        text = f"<strategy>{body}</strategy>"
        self.assertEqual(structure_indicator(text, 8), 1)
        self.assertEqual(structure_indicator(text, 7), 0)

    def test_structural_failure_has_no_tokens(self):
        parsed = parse_strategy("<strategy>a b c", 1024)
        self.assertEqual(parsed.token_count, 0)
        self.assertIsNone(parsed.strategy_body)

    def test_record(self):
        record = parse_strategy("<strategy>x</strategy>", 4).to_record()
        self.assertEqual(record['failure_reason'], None)
        self.assertTrue(record['valid'])
        record = parse_strategy("x", 4).to_record()
        self.assertEqual(record['failure_reason'], 'missing_open')

    def test_fail_on_zero_budget(self):
        with self.assertRaises(ValueError):
            parse_strategy("<strategy>x</strategy>", 0)

    @given(st.text(), st.integers(1, 50))
    def test_deterministic(self, text, budget):
        self.assertEqual(
            parse_strategy(text, budget),
            parse_strategy.__wrapped__(text, budget))

    @given(
        st.text(alphabet=st.characters(blacklist_characters='<>')),
        st.integers(1, 20),
        st.integers(0, 20),
    )
    def test_monotone_in_budget(self, body, budget, extra):
        text = f"<strategy>{body}</strategy>"
        if parse_strategy(text, budget).valid:
            self.assertTrue(parse_strategy(text, budget + extra).valid)

    @given(st.text(alphabet=st.characters(blacklist_characters='<>')))
    def test_rewrapping_is_idempotent(self, body):
        parsed = parse_strategy(
            f"<think>t</think><strategy>{body}</strategy>", 1024)
        if parsed.valid:
            assert parsed.strategy_body is not None
            again = parse_strategy(
                f"<strategy>{parsed.strategy_body}</strategy>", 1024)
            self.assertEqual(again.strategy_body, parsed.strategy_body)


class ConstraintTestCase(TestCase):

    def setUp(self):
        @constraints.register('numbered-steps', "Body starts with '1.'")
        def numbered(parsed):
            return parsed.strategy_body.startswith('1.')

    def tearDown(self):
        constraints.registry.pop('numbered-steps', None)

    def test_constraint_multiplies_into_indicator(self):
        ok = "<strategy>1. split 2. merge</strategy>"
        bad = "<strategy>split and merge</strategy>"
        self.assertEqual(structure_indicator(ok, 64, ['numbered-steps']), 1)
        self.assertEqual(structure_indicator(bad, 64, ['numbered-steps']), 0)
        self.assertEqual(structure_indicator(bad, 64), 1)

    def test_unknown_constraint(self):
        with self.assertRaises(constraints.ConstraintNotFound):
            structure_indicator("<strategy>x</strategy>", 64, ['nope'])
