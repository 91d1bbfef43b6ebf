import json
import math

import numpy as np
import pytest

import hyperconn as hc


def test_tuple_ranking():
    assert hc.tuple_count(61, 3) == 39711
    assert hc.tuple_rank([1, 1], 3) == 3
    assert hc.tuple_unrank(3, 3, 2) == [1, 1]


def test_worked_example_variants():
    x = np.array([[0, 0, 1, 1], [0, 0, 1, 1]], dtype=float)
    paper = hc.alg1_total_correlation(x, d=2, epsilon=0.5, variant="paper")
    plugin = hc.alg1_total_correlation(x, d=2, epsilon=0.5, variant="plugin")
    assert paper[1] == pytest.approx(4 * math.log(2), abs=1e-12)
    assert plugin[1] == pytest.approx(math.log(2), abs=1e-12)


def test_exact_estimators_on_parity_triples():
    y = np.array([[1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float)
    assert hc.total_correlation_exact(y) == pytest.approx(math.log(2))
    assert hc.total_correlation_kl_exact(y) == pytest.approx(math.log(2))
    assert hc.oracle_total_corr_y() == pytest.approx(math.log(2), abs=1e-12)


def test_hyperconnectome_round_trip():
    subjects, labels = hc.gen_dataset(1, 1, 20, 5)
    assert labels == ["X", "Y"]
    h = hc.build_hyperconnectome(subjects[1])
    assert h.m == 3 and h.d == 3
    assert len(h.weights) == 10
    text = h.to_json()
    assert json.loads(text)["format"] == "hyperconnectome"
    assert hc.HyperConnectome.from_json(text).to_json() == text
    assert h.pairwise_reduce().shape == (3, 3)


def test_connectome_and_errors():
    x = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 4.0]])
    cm = hc.connectome(x)
    assert cm[0, 1] == pytest.approx(0.98198, abs=1e-5)
    with pytest.raises(hc.ContractViolation):
        hc.alg1_total_correlation(x, d=2, epsilon=-1.0)
    with pytest.raises(hc.ParseError):
        hc.HyperConnectome.from_json('{"format": ')


def test_svm_and_ttest():
    rng = np.random.default_rng(0)
    labels = [1 if i % 2 else -1 for i in range(40)]
    x = np.array([[2.0 * y + rng.normal(0, 0.3), -y + rng.normal(0, 0.3)] for y in labels])
    model = hc.svm_train(x, labels, seed=3)
    assert model.predict(x) == labels
    t, p = hc.two_sample_ttest([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert t == pytest.approx(-1.0)
    assert p == pytest.approx(0.3466, abs=1e-3)


def test_cli_entry_point(tmp_path):
    code, out, _ = hc.main(["simulate", "--subjects-x", "3", "--subjects-y", "3", "-o", str(tmp_path / "ds")])
    assert code == 0
    assert (tmp_path / "ds" / "manifest.json").exists()
    code, _, _ = hc.main(["simulate", "--nope"])
    assert code == 1
