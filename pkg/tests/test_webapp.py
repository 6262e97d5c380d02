import json
import os
import unittest
from pathlib import Path
from unittest.mock import patch

from fastapi.testclient import TestClient

from src.webapp import app

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


class WebApiTests(unittest.TestCase):
    def setUp(self):
        self.client = TestClient(app)

    def test_health(self):
        response = self.client.get("/api/health")
        self.assertEqual(response.status_code, 200)
        payload = response.json()
        self.assertEqual(payload["status"], "ok")
        self.assertIn("version", payload)
        self.assertIn("cows", payload["calculi"])
        self.assertEqual(payload["caps"]["max_states"], 5000)

    def test_parse(self):
        response = self.client.post(
            "/api/parse",
            json={"term": "(new x)(x?(a).[a=b]'y<c> | x!<b>)", "calculus": "pimpm"},
        )
        self.assertEqual(response.status_code, 200)
        result = response.json()["result"]
        self.assertEqual(result["pretty"], "(new x)(x?(a).[a=b] y!<c> | x!<b>)")
        self.assertEqual(result["free_names"], ["b", "c", "y"])
        self.assertFalse(result["closed"])

    def test_parse_context(self):
        response = self.client.post("/api/parse", json={"term": "theta(a.0 + [_1])", "calculus": "bccsp-theta"})
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()["result"]["holes"], [1])

    def test_parse_error_has_spans(self):
        response = self.client.post("/api/parse", json={"term": "a.", "calculus": "ccs"})
        self.assertEqual(response.status_code, 400)
        detail = response.json()["detail"]
        self.assertEqual(detail[0]["message"], "expected term after prefix dot")
        self.assertEqual(detail[0]["span"], {"start": 2, "end": 2})

    def test_unknown_calculus(self):
        response = self.client.post("/api/parse", json={"term": "0", "calculus": "lambda"})
        self.assertEqual(response.status_code, 422)

    def test_visible(self):
        response = self.client.post(
            "/api/visible",
            json={"term": "((a.0 + {a}:b.'c.0) | 'b.0 | 0)\\{a,b}", "calculus": "cpg"},
        )
        self.assertEqual(response.status_code, 200)
        result = response.json()["result"]
        self.assertEqual(result["status"], "holds")
        self.assertEqual([step["label"] for step in result["trace"]], ["{a}:tau", "'c"])
        self.assertTrue(result["complete"])

    def test_visible_rejects_context(self):
        response = self.client.post("/api/visible", json={"term": "a.[_1]"})
        self.assertEqual(response.status_code, 400)

    def test_visible_with_order(self):
        response = self.client.post(
            "/api/visible",
            json={"term": "theta(a.0 + tau.0)", "calculus": "bccsp-theta", "order": [["a", "tau"]]},
        )
        self.assertEqual(response.json()["result"]["status"], "fails")

    def test_caps_clamp_requested_bounds(self):
        with patch.dict(os.environ, {"REPFREE_API_MAX_STATES": "1"}, clear=False):
            response = self.client.post(
                "/api/visible",
                json={"term": "a.0 | 'a.0", "bounds": {"max_states": 1000}},
            )
        result = response.json()["result"]
        self.assertEqual(result["status"], "unknown")
        self.assertFalse(result["complete"])
        self.assertEqual(result["states"], 1)

    def test_lts(self):
        response = self.client.post("/api/lts", json={"term": "a.0 | 'a.0"})
        self.assertEqual(response.status_code, 200)
        result = response.json()["result"]
        self.assertEqual(len(result["states"]), 4)
        self.assertEqual(len(result["edges"]), 5)

    def test_witness(self):
        payload = json.loads((CORPUS / "pi-pattern.json").read_text(encoding="utf-8"))
        response = self.client.post("/api/witness", json=payload)
        self.assertEqual(response.status_code, 200)
        result = response.json()["result"]
        self.assertEqual(result["overall"], "violation-confirmed")
        self.assertTrue(result["matched"])

    def test_witness_rejects_bad_file(self):
        response = self.client.post("/api/witness", json={"version": 1, "id": "x"})
        self.assertEqual(response.status_code, 400)
        self.assertTrue(response.json()["detail"])

    def test_sim(self):
        response = self.client.post("/api/sim", json={"q": "a.0", "p": "b.0"})
        self.assertEqual(response.status_code, 200)
        result = response.json()["result"]
        self.assertFalse(result["holds"])
        self.assertEqual(result["distinguishing_depth"], 1)
        self.assertEqual(result["distinguishing_moves"], ["a"])

    def test_sim_stratum(self):
        response = self.client.post("/api/sim", json={"q": "a.0", "p": "b.0", "k": 0})
        self.assertTrue(response.json()["result"]["holds"])

    def test_sim_uses_priority_order(self):
        body = {"q": "a.0", "p": "theta(a.0 + tau.0)", "calculus": "bccsp-theta"}
        response = self.client.post("/api/sim", json=body)
        self.assertTrue(response.json()["result"]["holds"])
        response = self.client.post("/api/sim", json=dict(body, order=[["a", "tau"]]))
        self.assertEqual(response.status_code, 200)
        self.assertFalse(response.json()["result"]["holds"])

    def test_sim_uses_definitions(self):
        response = self.client.post(
            "/api/sim",
            json={"q": "a.0", "p": "A<a>", "definitions": {"A": {"params": ["x"], "body": "x.0"}}},
        )
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.json()["result"]["holds"])

    def test_definitions_outside_calculus_are_rejected(self):
        response = self.client.post(
            "/api/parse",
            json={"term": "A<>", "calculus": "ccs", "definitions": {"A": {"params": [], "body": "theta(a.0)"}}},
        )
        self.assertEqual(response.status_code, 400)
        self.assertIn("definition A", response.json()["detail"][0])

    def test_sim_incomplete(self):
        response = self.client.post(
            "/api/sim",
            json={"q": "!a.0", "p": "0", "bounds": {"max_bang_unfold": 1}},
        )
        self.assertEqual(response.status_code, 422)
        detail = response.json()["detail"]
        self.assertEqual(detail["side"], "Q")
        self.assertEqual(detail["bounds_hit"], ["max_bang_unfold"])


if __name__ == "__main__":
    unittest.main()
