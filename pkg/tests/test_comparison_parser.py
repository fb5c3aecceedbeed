import numpy as np
import pytest

from src.core.errors import MalformedInputError
from src.extractors.comparison_parser import (read_cardinal, read_comparisons, read_features,
                                              read_scores)


@pytest.fixture
def write(tmp_path):
    def factory(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path
    return factory


class TestReadComparisons:

    def test_single_record(self, write):
        data = read_comparisons(write('c.csv', "i,j,y\n0,1,1\n"))
        assert data.n == 2 and data.m == 1
        np.testing.assert_array_equal(data.records, [[0, 1, 1]])

    def test_canonicalizes(self, write):
        data = read_comparisons(write('c.csv', "i,j,y\n1,0,0\n"))
        np.testing.assert_array_equal(data.records, [[0, 1, 1]])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_comparisons(tmp_path / 'absent.csv')

    def test_explicit_n(self, write):
        assert read_comparisons(write('c.csv', "i,j,y\n0,1,1\n"), n=5).n == 5

    def test_empty_needs_n(self, write):
        path = write('c.csv', "i,j,y\n")
        assert read_comparisons(path, n=4).m == 0
        with pytest.raises(MalformedInputError):
            read_comparisons(path)

    @pytest.mark.parametrize("body, line", [
        ("0,0,1\n", 2),
        ("0,1,1\n0,1,2\n", 3),
        ("0,1,1\n-1,1,0\n", 3),
        ("0,1,1\n0,x,1\n", 3),
        ("0,1,1\n1.5,2,0\n", 3),
        ("0,1,1\n0,99999999999999999999,1\n", 3),
        ("-99999999999999999999,1,1\n", 2),
    ])
    def test_rejects_with_line(self, write, body, line):
        with pytest.raises(MalformedInputError) as info:
            read_comparisons(write('c.csv', "i,j,y\n" + body))
        assert info.value.line == line

    def test_out_of_range(self, write):
        with pytest.raises(MalformedInputError) as info:
            read_comparisons(write('c.csv', "i,j,y\n0,1,1\n0,3,1\n"), n=3)
        assert info.value.line == 3

    def test_ragged_row(self, write):
        with pytest.raises(MalformedInputError):
            read_comparisons(write('c.csv', "i,j,y\n0,1\n"))

    def test_bad_header(self, write):
        with pytest.raises(MalformedInputError) as info:
            read_comparisons(write('c.csv', "a,b,c\n0,1,1\n"))
        assert info.value.line == 1

    def test_empty_file(self, write):
        with pytest.raises(MalformedInputError):
            read_comparisons(write('c.csv', ""))


class TestReadFeatures:

    def test_any_order(self, write):
        features = read_features(write('f.csv', "id,f0,f1\n2,5,6\n0,1,2\n1,3,4\n"))
        assert (features.n, features.d) == (3, 2)
        np.testing.assert_array_equal(features.x, [[1, 2], [3, 4], [5, 6]])

    def test_duplicate_id(self, write):
        with pytest.raises(MalformedInputError):
            read_features(write('f.csv', "id,f0\n0,1\n0,2\n"))

    def test_huge_id(self, write):
        with pytest.raises(MalformedInputError) as info:
            read_features(write('f.csv', "id,f0\n0,1\n18446744073709551616,2\n"))
        assert info.value.line == 3

    def test_wide_rows(self, write, rng):
        values = rng.normal(size=(4, 512))
        header = "id," + ",".join(f"f{k}" for k in range(512))
        rows = [f"{i}," + ",".join(repr(float(v)) for v in values[i]) for i in range(4)]
        features = read_features(write('f.csv', "\n".join([header] + rows) + "\n"))
        assert features.d == 512
        np.testing.assert_array_equal(features.x, values)

    def test_non_finite(self, write):
        with pytest.raises(MalformedInputError) as info:
            read_features(write('f.csv', "id,f0\n0,1\n1,nan\n"))
        assert info.value.line == 3


class TestReadScores:

    def test_scores_and_cardinal(self, write):
        scores = read_scores(write('s.csv', "id,score,rank\n1,0.7,0\n0,0.3,1\n"))
        np.testing.assert_array_equal(scores, [0.3, 0.7])
        ratings = read_cardinal(write('r.csv', "id,score\n0,1.5\n1,-0.5\n"))
        np.testing.assert_array_equal(ratings, [1.5, -0.5])

    def test_missing_id(self, write):
        with pytest.raises(MalformedInputError):
            read_scores(write('s.csv', "id,score,rank\n0,0.5,0\n2,0.5,1\n"))
