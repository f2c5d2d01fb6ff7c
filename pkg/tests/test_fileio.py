"""Strict JSON parsing and canonical serialization."""

import json

import numpy as np
import pytest

from klsolve import (
    ParseError,
    SolverConfig,
    generate_bilinear_instance,
    multi_start,
    plant_solution,
)
from klsolve.fileio import (
    dumps_canonical,
    parse_general_document,
    parse_json,
    parse_system_document,
    report_document,
    system_document,
)


def doc_square():
    return {
        "variables": ["x"],
        "monomials": [[2]],
        "equations": [{"coefficients": [1.0], "rhs": 4.0}],
    }


class TestParseSystem:
    def test_minimal_document(self):
        system, structure, note = parse_system_document(doc_square())
        assert system.variable_names == ("x",)
        assert structure is None and note is None
        assert system.evaluate_lhs(np.array([2.0]))[0] == pytest.approx(4.0)

    def test_structure_and_note_round(self):
        doc = doc_square()
        doc["degree_structure"] = {"g": [[1]], "d": [2]}
        doc["note"] = "square"
        system, structure, note = parse_system_document(doc)
        assert structure is not None and structure.d[0] == 2.0
        assert note == "square"

    @pytest.mark.parametrize(
        "mutate, path",
        [
            (lambda d: d.pop("variables"), "variables: missing required key"),
            (lambda d: d.pop("equations"), "equations: missing required key"),
            (lambda d: d["equations"][0].pop("rhs"), "equations[0].rhs: missing"),
            (
                lambda d: d["equations"][0].__setitem__("coefficients", [-1.0]),
                "equations[0].coefficients[0]: must be non-negative",
            ),
            (
                lambda d: d["equations"][0].__setitem__("rhs", 0),
                "equations[0].rhs: must be strictly positive",
            ),
            (
                lambda d: d["equations"][0].__setitem__("rhs", True),
                "equations[0].rhs: expected a number",
            ),
            (lambda d: d.__setitem__("bogus", 1), "unknown key 'bogus'"),
            (
                lambda d: d.__setitem__("monomials", [[2], [1]]),
                "coefficients: expected 2 entries, got 1",
            ),
            (lambda d: d.__setitem__("note", 7), "note: expected a string"),
            (
                lambda d: d.__setitem__("degree_structure", {"g": [[1]], "d": [0]}),
                "degree_structure.d[0]: must be strictly positive",
            ),
            (
                lambda d: d.__setitem__("degree_structure", {"g": [[1], [1]], "d": [2]}),
                "g has 2 rows but d has 1 entries",
            ),
            (lambda d: d.__setitem__("variables", []), "variables: must not be empty"),
        ],
    )
    def test_errors_carry_json_paths(self, mutate, path):
        doc = doc_square()
        mutate(doc)
        with pytest.raises(ParseError) as err:
            parse_system_document(doc)
        assert path in str(err.value)

    def test_top_level_must_be_object(self):
        with pytest.raises(ParseError, match="expected a JSON object"):
            parse_system_document([1, 2])

    def test_non_finite_literals_rejected_in_text(self):
        with pytest.raises(ParseError, match="non-finite"):
            parse_json('{"variables": ["x"], "equations": [NaN]}')

    def test_invalid_json_text(self):
        with pytest.raises(ParseError, match="invalid JSON"):
            parse_json("{oops")


class TestParseGeneral:
    def test_signed_coefficients_allowed(self):
        doc = {
            "variables": ["x", "y"],
            "monomials": [[2, 0], [0, 1]],
            "equations": [{"coefficients": [1.0, -1.0], "rhs": 0}],
        }
        gsys = parse_general_document(doc)
        assert gsys.evaluate([2.0, 4.0])[0] == pytest.approx(0.0)

    def test_nonzero_rhs_rejected(self):
        doc = {
            "variables": ["x"],
            "monomials": [[1]],
            "equations": [{"coefficients": [1.0], "rhs": 1.0}],
        }
        with pytest.raises(ParseError, match="fold constants"):
            parse_general_document(doc)

    def test_fractional_exponents_rejected(self):
        doc = {
            "variables": ["x"],
            "monomials": [[0.5]],
            "equations": [{"coefficients": [1.0], "rhs": 0}],
        }
        with pytest.raises(ParseError, match="exponents must be integers"):
            parse_general_document(doc)


class TestCanonicalOutput:
    def test_trailing_newline_and_integers(self):
        text = dumps_canonical(system_document(*parse_system_document(doc_square())[:1]))
        assert text.endswith("}\n")
        assert '"rhs": 4\n' in text or '"rhs": 4,' in text or '"rhs": 4' in text

    def test_round_trip_is_byte_stable(self):
        system, structure, _ = generate_bilinear_instance(2, seed=7)
        doc = system_document(system, structure, note="round trip")
        text = dumps_canonical(doc)
        reparsed = parse_system_document(parse_json(text))
        again = dumps_canonical(system_document(*reparsed))
        assert again == text

    def test_integers_serialized_without_decimal_point(self):
        doc = system_document(*parse_system_document(doc_square())[:1])
        assert doc["equations"][0]["rhs"] == 4
        assert isinstance(doc["equations"][0]["rhs"], int)
        assert json.dumps(doc["monomials"]) == "[[2]]"


class TestReportDocument:
    def result(self):
        mono = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        system, _ = plant_solution(2, mono, seed=5)
        return system, multi_start(system, config=SolverConfig(restarts=3, seed=1))

    def test_keys_and_values(self):
        system, result = self.result()
        doc = report_document(result, system)
        assert set(doc) == {
            "status",
            "x",
            "divergence",
            "gradient_residual",
            "residuals",
            "iterations",
            "restart_summaries",
            "clusters",
        }
        assert doc["status"] == result.reports[0].status
        assert list(doc["x"]) == list(system.variable_names)
        assert len(doc["restart_summaries"]) == 3
        assert sum(c["members"] for c in doc["clusters"]) == 3
        assert "trace" not in doc

    def test_trace_toggle(self):
        system, result = self.result()
        doc = report_document(result, system, include_trace=True)
        assert doc["trace"][-1] == pytest.approx(result.reports[0].divergence_final)
        assert all(v is None or np.isfinite(v) for v in doc["trace"])

    def test_canonical_bytes_parse_back(self):
        system, result = self.result()
        text = dumps_canonical(report_document(result, system))
        assert json.loads(text)["iterations"]["outer"] >= 1
