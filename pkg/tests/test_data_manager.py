import io

import numpy as np
import pandas as pd

from src.core.data_manager import (DataManager, write_comparisons, write_features,
                                   write_metric_row, write_report, write_scores, write_sweep)
from src.core.experiment import TrialRow
from src.core.metrics import MetricRow
from src.core.model import ComparisonDataset, FeatureSet, RankingResult
from src.extractors.comparison_parser import read_comparisons, read_features, read_scores


class TestWriteScores:

    def test_tie_break_by_index(self):
        buffer = io.StringIO()
        write_scores(buffer, RankingResult.from_scores(np.array([0.5, 0.5]), 'test'))
        assert buffer.getvalue() == "id,score,rank\n0,0.5,0\n1,0.5,1\n"

    def test_highest_gets_rank_zero(self):
        buffer = io.StringIO()
        write_scores(buffer, RankingResult.from_scores(np.array([0.3, 0.7]), 'test'))
        frame = pd.read_csv(io.StringIO(buffer.getvalue()))
        assert list(frame['rank']) == [1, 0]

    def test_values_survive_a_read(self, tmp_path, rng):
        scores = rng.dirichlet(np.ones(25))
        result = RankingResult.from_scores(scores, 'test')
        path = tmp_path / 'scores.csv'
        write_scores(path, result)
        np.testing.assert_array_equal(read_scores(path), result.scores)


class TestWriteInputs:

    def test_comparisons(self, tmp_path):
        data = ComparisonDataset(4, np.array([[0, 1, 1], [2, 3, 0]]))
        path = tmp_path / 'c.csv'
        write_comparisons(path, data)
        assert path.read_text() == "i,j,y\n0,1,1\n2,3,0\n"
        np.testing.assert_array_equal(read_comparisons(path, n=4).records, data.records)

    def test_empty_comparisons_keep_header(self):
        buffer = io.StringIO()
        write_comparisons(buffer, ComparisonDataset(3, np.zeros((0, 3))))
        assert buffer.getvalue() == "i,j,y\n"

    def test_features(self, tmp_path, rng):
        features = FeatureSet(rng.normal(size=(5, 3)))
        path = tmp_path / 'f.csv'
        write_features(path, features)
        assert path.read_text().splitlines()[0] == "id,f0,f1,f2"
        np.testing.assert_array_equal(read_features(path).x, features.x)


class TestWriteReports:

    def test_sweep_rows_and_empty_cells(self):
        rows = [TrialRow(m=10, trial=0, algorithm='rc', base_params='',
                         metrics=MetricRow(kendall_tau=0.5, l2_rel_err=0.25), failed=True)]
        buffer = io.StringIO()
        write_sweep(buffer, rows)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "m,trial,algorithm,params,kendall_tau,l2_rel_err,test_err"
        assert lines[1] == "10,0,rc,failed=true,0.5,0.25,"

    def test_sweep_header_without_rows(self):
        buffer = io.StringIO()
        write_sweep(buffer, [])
        assert buffer.getvalue() == "m,trial,algorithm,params,kendall_tau,l2_rel_err,test_err\n"

    def test_metric_row(self):
        buffer = io.StringIO()
        write_metric_row(buffer, MetricRow(kendall_tau=1.0, l2_rel_err=0.0, test_err=0.5))
        assert buffer.getvalue() == "kendall_tau,l2_rel_err,test_err\n1,0,0.5\n"

    def test_report(self):
        buffer = io.StringIO()
        write_report(buffer, {'gamma': 0.5, 'rc_sample_complexity': 12})
        assert buffer.getvalue() == "quantity,value\ngamma,0.5\nrc_sample_complexity,12\n"


class TestDataManager:

    def test_paths(self, tmp_path):
        manager = DataManager(tmp_path)
        paths = manager.sweep_paths('runs/linear.csv')
        assert paths['raw'] == tmp_path / 'runs' / 'linear.csv'
        assert paths['aggregate'] == tmp_path / 'runs' / 'linear_aggregate.csv'
        assert paths['density'] == tmp_path / 'runs' / 'linear_density.csv'
        assert manager.sweep_paths('linear')['raw'] == tmp_path / 'linear.csv'

    def test_absolute_paths_are_kept(self, tmp_path):
        target = tmp_path / 'elsewhere' / 'out.csv'
        assert DataManager(tmp_path / 'base').resolve(target) == target

    def test_write_outputs(self, tmp_path):
        rows = [TrialRow(m=4, trial=0, algorithm='rc', base_params='',
                         metrics=MetricRow(kendall_tau=1.0, l2_rel_err=0.1))]
        aggregate = pd.DataFrame({'m': [4], 'algorithm': ['rc']})
        written = DataManager(tmp_path).write_sweep_outputs('sweep.csv', rows, aggregate)
        assert set(written) == {'raw', 'aggregate'}
        assert written['raw'].exists() and written['aggregate'].exists()
