import numpy as np
import pytest

from ccqkan.experiments import (
    CSV_FIELDS,
    GridSpec,
    IncompletePairingError,
    MnistSpec,
    curves_to_csv,
    init_stream,
    per_class_matrix,
    read_results_csv,
    records_to_csv,
    run_grid,
    run_mnist_binary,
    run_mnist_ova,
    shots_stream,
    summarize,
    write_results_csv,
)
from ccqkan.errors import InvalidInputError
from ccqkan.network import MERGED, NetworkConfig
from ccqkan.statevector import EvalCondition
from ccqkan.training import ORIGINAL, RED_I, RED_T, RunRecord, TrainConfig, train, transfer_params
from ccqkan.data import synthetic_dataset


def small_spec(**kw):
    base = dict(configs=[(2, 2)], seeds=[0, 1], train=TrainConfig(steps=3))
    base.update(kw)
    return GridSpec(**base)


class TestRunGrid:
    def test_single_record(self):
        recs = run_grid(small_spec(seeds=[0], models=(ORIGINAL,), train=TrainConfig()))
        assert len(recs) == 1 and len(recs[0].losses) == 21

    def test_counts(self):
        recs = run_grid(small_spec(configs=[(2, 2), (2, 3)], seeds=[0, 1, 2]))
        assert len(recs) == 2 * 3 * 3
        assert {r.model for r in recs} == {ORIGINAL, RED_T, RED_I}

    def test_csv_determinism_and_roundtrip(self, tmp_path):
        spec = small_spec()
        a, b = records_to_csv(run_grid(spec)), records_to_csv(run_grid(spec))
        assert a == b
        assert a.splitlines()[0] == ",".join(CSV_FIELDS)
        path = tmp_path / "r.csv"
        recs = run_grid(spec)
        write_results_csv(recs, path)
        back = read_results_csv(path)
        assert [r.losses for r in back] == [r.losses for r in recs]
        assert records_to_csv(back) == a

    def test_red_t_source_invariant(self):
        recs = run_grid(small_spec(seeds=[0, 1, 2]))
        by = {(r.model, r.seed): r for r in recs}
        for s in (0, 1, 2):
            assert abs(by[(RED_T, s)].losses[0] - by[(ORIGINAL, s)].final_loss) <= 1e-9

    @pytest.mark.parametrize("source", ["ideal", "same"])
    def test_red_t_source_replay(self, source):
        cond = EvalCondition.shots(200)
        recs = run_grid(small_spec(conditions=[cond], red_t_source=source, seeds=[0]))
        assert {r.condition for r in recs} == {"shots"}
        red_t = next(r for r in recs if r.model == RED_T)
        if source == "ideal":
            src = run_grid(small_spec(seeds=[0], models=(ORIGINAL,)))[0]
        else:
            src = next(r for r in recs if r.model == ORIGINAL)
        ds = synthetic_dataset(2)
        replay = train(
            transfer_params(src.final_params), ds.inputs, ds.targets, NetworkConfig(2, 2, MERGED),
            TrainConfig(steps=3), cond, shots_stream(0, 2, 2, cond), model=RED_T,
        )
        assert replay.losses == red_t.losses

    def test_inits_differ_noise_shared(self):
        a = init_stream(0, ORIGINAL, 2, 2).uniform(size=5)
        b = init_stream(0, RED_I, 2, 2).uniform(size=5)
        assert not np.array_equal(a, b)
        cond = EvalCondition.shots(100)
        np.testing.assert_array_equal(shots_stream(3, 2, 2, cond).uniform(size=5), shots_stream(3, 2, 2, cond).uniform(size=5))

    def test_spec_validation(self):
        with pytest.raises(InvalidInputError):
            GridSpec(models=(RED_T,))
        with pytest.raises(InvalidInputError):
            GridSpec(red_t_source="nope")


def rec(n, d, model, seed, final, cond="ideal"):
    return RunRecord(n, d, model, cond, "exact_channel", seed, [final + 1.0, final])


def hand_built():
    recs = []
    rng = np.random.default_rng(0)
    for s in range(16):
        # config (2,2): Red-T uniformly better, Red-I indistinguishable
        base = 0.5 + 0.01 * s
        recs += [rec(2, 2, ORIGINAL, s, base), rec(2, 2, RED_T, s, base - 0.2)]
        recs.append(rec(2, 2, RED_I, s, base + (0.001 if s % 2 else -0.001) * (s + 1)))
        # config (3,3): Original uniformly better than both others
        recs += [rec(3, 3, ORIGINAL, s, 0.1 + rng.uniform(0, 0.01))]
        recs += [rec(3, 3, RED_T, s, 0.2 + rng.uniform(0, 0.01)), rec(3, 3, RED_I, s, 0.3 + rng.uniform(0, 0.01))]
    return recs


class TestSummarize:
    def test_hand_tally(self):
        table = summarize(hand_built())
        c = table.significance_counts
        assert c["original_vs_red_t"]["ideal"]["***"] == 2
        assert c["original_vs_red_t"]["ideal"]["lower_loss"] == {ORIGINAL: 1, RED_T: 1}
        assert c["original_vs_red_i"]["ideal"]["n.s."] == 1
        assert c["original_vs_red_i"]["ideal"]["***"] == 1
        assert c["red_t_vs_red_i"]["ideal"]["***"] == 2
        cell = table.cells["[2,2,1] d=2"]["ideal"]
        assert cell["original_vs_red_t"]["T"] == 0 and cell["original_vs_red_t"]["label"] == "***"
        assert cell[ORIGINAL]["n"] == 10
        assert cell[ORIGINAL]["mean"] == pytest.approx(np.mean([0.5 + 0.01 * s for s in range(10)]))

    def test_constant_losses(self):
        recs = [rec(2, 2, m, s, 0.25) for m in (ORIGINAL, RED_T, RED_I) for s in range(16)]
        table = summarize(recs)
        cell = table.cells["[2,2,1] d=2"]["ideal"]
        assert cell[ORIGINAL]["std"] == 0.0
        assert cell["original_vs_red_t"]["label"] == "degenerate"
        assert table.significance_counts["original_vs_red_t"]["ideal"]["degenerate"] == 1

    def test_incomplete(self):
        recs = [r for r in hand_built() if not (r.model == RED_I and r.seed == 5 and r.n == 3)]
        with pytest.raises(IncompletePairingError) as exc:
            summarize(recs)
        assert exc.value.missing == [(3, 3, "ideal", RED_I, 5)]

    def test_outputs(self):
        table = summarize(hand_built())
        assert '"significance_counts"' in table.to_json()
        lines = curves_to_csv(table).splitlines()
        assert len(lines) == 1 + 2 * 3 * 2


class TestDigits:
    def test_binary_small(self):
        out = run_mnist_binary(MnistSpec(n_splits=2, train=TrainConfig(steps=5), n_train=40, n_test=30))
        res = out["results"][4]
        assert set(res) == {ORIGINAL, RED_T, RED_I}
        for m in res.values():
            assert set(np.unique(m["predictions"])) <= {-1.0, 1.0}
            assert len(m["test_accuracy"]) == 2
        assert len(out["records"]) == 6

    def test_ova_small(self):
        spec = MnistSpec(ns=[3], d=2, n_splits=2, models=(ORIGINAL, RED_I), train=TrainConfig(steps=2), n_train=60, n_test=30)
        out = run_mnist_ova(spec)
        res = out["results"][3]
        assert res[ORIGINAL]["n_classifiers"] == 20
        assert len(out["records"]) == 40
        assert sorted({r.cls for r in out["records"]}) == list(range(10))
        mat, header = per_class_matrix(out)
        assert mat.shape == (10, 2) and header == [(3, ORIGINAL), (3, RED_I)]
        assert "wilcoxon" in res
