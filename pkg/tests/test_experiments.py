"""Experiment harness: sweeps, baseline comparison, plot data, file layout."""

import pytest

from gazelines.detector import EvalReport, train
from gazelines.experiments import (
    ExperimentSpec,
    compare_baseline,
    emit_plot_data,
    run_table_experiment,
    write_summary,
)
from gazelines.simulate import SimConfig, simulate_corpus, simulate_page, train_test_split

SMALL_SIM = SimConfig(n_pages=8, n_lines=6, t_line=0.5)


def small_spec(scenario="no_repeat", **kw):
    defaults = dict(
        scenario=scenario,
        sim=SMALL_SIM,
        noise_levels=(0.5, 0.2),
        train_pages=6,
        test_pages=2,
        seed=3,
        max_iters=2,
    )
    defaults.update(kw)
    return ExperimentSpec(**defaults)


class TestExperimentSpec:
    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="bogus")

    def test_split_must_fit_corpus(self):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="no_repeat", sim=SMALL_SIM, train_pages=7, test_pages=2)

    def test_noise_levels_required(self):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="no_repeat", noise_levels=())

    def test_real_csv_needs_path(self):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="real_csv")


class TestRunTableExperiment:
    def test_rows_and_files(self, tmp_path):
        rows = run_table_experiment(small_spec(), out_dir=tmp_path)
        assert [sigma for sigma, _ in rows] == [0.5, 0.2]
        assert all(0.0 <= e <= 100.0 for _, e in rows)
        for sigma in (0.5, 0.2):
            table = tmp_path / "no_repeat" / str(sigma) / "table.csv"
            lines = table.read_text().splitlines()
            assert lines[0] == "page,e_p"
            assert len(lines) == 3  # header + two test pages

    def test_deterministic_given_seed(self):
        a = run_table_experiment(small_spec())
        b = run_table_experiment(small_spec())
        assert a == b

    def test_high_noise_errors_exceed_low_noise(self):
        for scenario in ("no_repeat", "random_repeat"):
            rows = dict(run_table_experiment(small_spec(scenario, noise_levels=(1.0, 0.2))))
            assert rows[1.0] > rows[0.2]

    def test_real_scenario_rejected(self, tmp_path):
        csv = tmp_path / "log.csv"
        csv.write_text("t,x,y\n0.0,0.1,0.2\n")
        spec = ExperimentSpec(scenario="real_csv", csv_path=str(csv))
        with pytest.raises(ValueError):
            run_table_experiment(spec)

    def test_summary_layout(self, tmp_path):
        results = {"no_repeat": [(1.0, 50.0), (0.2, 1.0)], "random_repeat": [(1.0, 60.0)]}
        path = write_summary(tmp_path, results)
        lines = path.read_text().splitlines()
        assert lines[0] == "scenario,sigma,e_avg"
        assert len(lines) == 4
        assert lines[1] == "no_repeat,1.0,50.000000"


class TestCompareBaseline:
    def test_noiseless_limit(self):
        cfg = SimConfig(sigma=0.01, seed=5, n_pages=6, n_lines=6, t_line=0.5)
        pages = simulate_corpus(cfg)
        trainset, testset = train_test_split(pages, 4)
        model = train(trainset, max_iters=2)
        base, hmm = compare_baseline(testset, model)
        assert base.method_tag == "discretizer-only"
        assert hmm.method_tag == "hmm"
        assert base.average_error <= 0.1
        assert hmm.average_error <= 0.1

    def test_hmm_beats_discretizer_under_repetition_noise(self):
        cfg = SimConfig(sigma=0.63, seed=4, n_pages=16, repeat_range=(1, 5))
        pages = simulate_corpus(cfg)
        trainset, testset = train_test_split(pages, 12)
        model = train(trainset, max_iters=2)
        base, hmm = compare_baseline(testset, model)
        assert hmm.average_error < base.average_error

    def test_reports_cover_identical_pages(self):
        cfg = SimConfig(sigma=0.3, seed=2, n_pages=5, n_lines=6, t_line=0.5)
        pages = simulate_corpus(cfg)
        model = train(pages[:3], max_iters=2)
        base, hmm = compare_baseline(pages[3:], model)
        assert len(base.per_page_error) == len(hmm.per_page_error) == 2


class TestEmitPlotData:
    def test_scatter_rows(self, tmp_path):
        page = simulate_page(SimConfig(sigma=0.1, n_lines=3, n_pages=1), 0)
        out = emit_plot_data(page, "scatter", tmp_path / "scatter.csv")
        lines = out.read_text().splitlines()
        assert lines[0] == "t,x,y,label"
        assert len(lines) == len(page) + 1
        t, x, y, label = lines[1].split(",")
        assert float(t) == page.times[0]
        assert float(x) == page.xs[0]
        assert float(y) == page.ys[0]
        assert int(label) == page.labels[0]

    def test_page_error_rows(self, tmp_path):
        base = EvalReport((10.0, 20.0), "discretizer-only")
        hmm = EvalReport((5.0, 2.0), "hmm")
        out = emit_plot_data((base, hmm), "page_errors", tmp_path / "errors.csv")
        lines = out.read_text().splitlines()
        assert lines[0] == "page,e_discretizer,e_hmm"
        assert lines[1] == "1,10.000000,5.000000"
        assert lines[2] == "2,20.000000,2.000000"

    def test_empty_reports_give_header_only(self, tmp_path):
        base = EvalReport((), "discretizer-only")
        hmm = EvalReport((), "hmm")
        out = emit_plot_data((base, hmm), "page_errors", tmp_path / "empty.csv")
        assert out.read_text() == "page,e_discretizer,e_hmm\n"

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plot_data(None, "heatmap", tmp_path / "x.csv")

    def test_io_error_carries_path(self, tmp_path):
        page = simulate_page(SimConfig(sigma=0.1, n_lines=3, n_pages=1), 0)
        target = tmp_path / "missing" / "deep" / "scatter.csv"
        target.parent.parent.write_text("not a directory")
        with pytest.raises(OSError) as excinfo:
            emit_plot_data(page, "scatter", target)
        assert "scatter.csv" in str(excinfo.value)
