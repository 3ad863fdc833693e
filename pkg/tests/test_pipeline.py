import numpy as np
import pytest

from alpipe.core import Scenario, ResolvedSetting
from alpipe.data import fit_preprocess, parse_csv, table_to_dataset
from alpipe.errors import ConfigurationError
from alpipe.learners import LearnerSpec
from alpipe.pipeline import AlpSpec, evaluate_model, run_alp, run_alp_from_table
from alpipe.store import FileConnector
from tests.conftest import make_gaussian_dataset

FAST = ResolvedSetting(
    name="fast", initial_labeled=10, total_budget=40, batch_size=8,
    max_iterations=5,
)


def _run(strategy="margin", learner="gnb", seed=0, dataset=None, **kwargs):
    ds = dataset or make_gaussian_dataset(n=150, seed=3)
    scenario = Scenario(ds.source_id, FAST, seed, seed)
    alp = AlpSpec(LearnerSpec(learner), strategy)
    return run_alp(scenario, alp, ds, **kwargs)


class TestAlpSpec:
    def test_unknown_strategy(self):
        with pytest.raises(ConfigurationError):
            AlpSpec(LearnerSpec("gnb"), "oracle")

    def test_committee_flag(self):
        assert AlpSpec(LearnerSpec("gnb"), "bald").needs_committee
        assert not AlpSpec(LearnerSpec("gnb"), "margin").needs_committee


class TestEvaluateModel:
    class Fixed:
        def __init__(self, P):
            self.P = np.asarray(P, dtype=np.float64)

        def predict_proba(self, X):
            return self.P

    def test_perfect(self):
        model = self.Fixed([[0.9, 0.1], [0.1, 0.9]])
        acc, f1 = evaluate_model(model, np.zeros((2, 1)), np.array([0, 1]))
        assert (acc, f1) == (1.0, 1.0)

    def test_worked_example(self):
        # preds = [0, 0, 1], truth = [0, 1, 1]
        model = self.Fixed([[0.9, 0.1], [0.6, 0.4], [0.2, 0.8]])
        acc, f1 = evaluate_model(model, np.zeros((3, 1)), np.array([0, 1, 1]))
        assert acc == pytest.approx(2 / 3)
        # class 0: tp=1 fp=1 fn=0 -> 2/3; class 1: tp=1 fp=0 fn=1 -> 2/3
        assert f1 == pytest.approx(2 / 3)

    def test_class_absent_from_test_excluded(self):
        model = self.Fixed([[0.9, 0.1, 0.0], [0.8, 0.2, 0.0]])
        acc, f1 = evaluate_model(model, np.zeros((2, 1)), np.array([0, 0]))
        assert (acc, f1) == (1.0, 1.0)

    def test_argmax_tie_lowest_class(self):
        model = self.Fixed([[0.5, 0.5]])
        acc, _ = evaluate_model(model, np.zeros((1, 1)), np.array([0]))
        assert acc == 1.0


class TestRunAlp:
    def test_record_shape(self):
        rec = _run()
        assert rec.status == "completed"
        assert rec.iterations[0]["iteration"] == 0
        assert rec.iterations[0]["queried"] == []
        assert rec.iterations[0]["labeled_size"] == len(rec.initial_labeled_indices)
        assert len(rec.iterations) == 6  # iteration 0 plus 5 query rounds

    def test_budget_accounting(self):
        rec = _run()
        queried = [i for it in rec.iterations for i in it["queried"]]
        assert len(queried) == 40  # exactly the budget
        assert len(set(queried)) == 40
        sizes = [it["labeled_size"] for it in rec.iterations]
        assert sizes == [10, 18, 26, 34, 42, 50]

    def test_queried_only_from_unlabeled_train(self):
        rec = _run()
        train = set(rec.train_indices)
        initial = set(rec.initial_labeled_indices)
        queried = {i for it in rec.iterations for i in it["queried"]}
        assert queried <= train - initial

    def test_replay_determinism(self):
        a = _run(strategy="power_margin", seed=5)
        b = _run(strategy="power_margin", seed=5)
        assert a.replay_key() == b.replay_key()

    def test_different_pipeline_seed_diverges(self):
        ds = make_gaussian_dataset(n=150, seed=3)
        a = run_alp(Scenario("x", FAST, 1, 1), AlpSpec(LearnerSpec("gnb"), "random"), ds)
        b = run_alp(Scenario("x", FAST, 1, 2), AlpSpec(LearnerSpec("gnb"), "random"), ds)
        assert a.replay_key() != b.replay_key()
        assert a.train_indices == b.train_indices  # split fixed by split seed

    def test_batch_clipped_by_budget(self):
        setting = ResolvedSetting(
            name="clip", initial_labeled=5, total_budget=10, batch_size=4,
            max_iterations=10,
        )
        ds = make_gaussian_dataset(n=60, seed=1)
        rec = run_alp(Scenario("x", setting, 0, 0), AlpSpec(LearnerSpec("gnb"), "margin"), ds)
        batches = [len(it["queried"]) for it in rec.iterations[1:]]
        assert batches == [4, 4, 2]  # final batch clipped to remaining budget

    def test_stops_when_pool_exhausted(self):
        setting = ResolvedSetting(
            name="exhaust", initial_labeled=5, total_budget=100, batch_size=10,
            max_iterations=50,
        )
        ds = make_gaussian_dataset(n=30, seed=2)  # train split of 20 rows
        rec = run_alp(Scenario("x", setting, 0, 0), AlpSpec(LearnerSpec("gnb"), "margin"), ds)
        final = rec.iterations[-1]["labeled_size"]
        assert final == len(rec.train_indices)

    def test_failed_fit_partial_record(self, tmp_path):
        ds = make_gaussian_dataset(n=150, seed=3)
        alp = AlpSpec(
            LearnerSpec("external", {"command": "/nonexistent/adapter"}),
            "margin",
        )
        rec = run_alp(Scenario("x", FAST, 0, 0), alp, ds,
                      connector=FileConnector(tmp_path))
        assert rec.status == "failed"
        assert rec.failure_reason
        assert list(tmp_path.rglob("*.run"))  # partial record persisted

    def test_connector_persists(self, tmp_path):
        rec = _run(connector=FileConnector(tmp_path))
        files = list(tmp_path.rglob("*.run"))
        assert len(files) == 1
        assert rec.to_json() == files[0].read_text()

    @pytest.mark.parametrize("strategy", ["bald", "qbc", "coreset", "clue"])
    def test_strategy_families_complete(self, strategy):
        assert _run(strategy=strategy).status == "completed"

    def test_accuracy_improves_on_easy_data(self):
        ds = make_gaussian_dataset(n=300, spread=4.0, seed=9)
        rec = _run(dataset=ds, learner="knn")
        assert rec.iterations[-1]["accuracy"] >= 0.95


class TestRunFromTable:
    def test_preprocessing_fit_on_train_only(self):
        # a wild numeric outlier confined to the test split must not
        # perturb the z-scores the pipeline trains on
        rows = ["num,t"]
        for i in range(90):
            rows.append(f"{i % 7},{'a' if i % 2 else 'b'}")
        table = parse_csv("\n".join(rows) + "\n", ["numeric", "nominal"], "t")
        setting = ResolvedSetting(
            name="t", initial_labeled=6, total_budget=12, batch_size=4,
            max_iterations=3,
        )
        rec = run_alp_from_table(table, Scenario("t", setting, 0, 0),
                                 AlpSpec(LearnerSpec("gnb"), "margin"))
        assert rec.status == "completed"
        assert rec.n_classes == 2

    def test_matches_manual_pipeline(self):
        rows = ["num,t"] + [f"{i},{'a' if i % 2 else 'b'}" for i in range(60)]
        table = parse_csv("\n".join(rows) + "\n", ["numeric", "nominal"], "t")
        setting = ResolvedSetting(
            name="t", initial_labeled=6, total_budget=12, batch_size=4,
            max_iterations=3,
        )
        scenario = Scenario("t", setting, 4, 4)
        alp = AlpSpec(LearnerSpec("knn"), "entropy")
        rec = run_alp_from_table(table, scenario, alp, source_id="t")

        from alpipe.core import Dataset, make_splits
        y, n_classes = table.target_labels()
        probe = Dataset(np.zeros((60, 1)), y, n_classes, "t", ("p",))
        split = make_splits(probe, scenario)
        model = fit_preprocess(table, split.train_indices)
        ds = table_to_dataset(table, model, "t")
        manual = run_alp(scenario, alp, ds, split=split)
        assert rec.replay_key() == manual.replay_key()
