import json

import pytest

from src.core.errors import ConfigError
from src.core.run_config import DEFAULT_SIGMA_GRID, RunConfig, default_m_grid, load_run_config


def write_config(tmp_path, data, name='run.json'):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestRunConfig:

    def test_defaults(self):
        config = RunConfig.from_dict({'generator': 'linear', 'n': 200})
        assert config.repeats == 40
        assert config.resolved_m_grid(200) == default_m_grid(200)
        assert config.include_rc and config.eta_grid

    def test_default_grids(self):
        assert default_m_grid(200) == [50, 100, 200, 400, 800, 1600, 3200, 6400]
        assert DEFAULT_SIGMA_GRID[0] == 2.0 ** -6 and DEFAULT_SIGMA_GRID[-1] == 1.0

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({'generator': 'linear', 'n': 10, 'etta_grid': [0.1]})
        assert info.value.key == 'etta_grid'
        assert 'etta_grid' in str(info.value)

    @pytest.mark.parametrize("data, key", [
        ({'generator': 'linear', 'n': 10, 'm_grid': []}, 'm_grid'),
        ({'generator': 'linear', 'n': 10, 'm_grid': [20, 10]}, 'm_grid'),
        ({'generator': 'linear', 'n': 1}, 'n'),
        ({'generator': 'magic', 'n': 10}, 'generator'),
        ({'generator': 'linear', 'n': 10, 'repeats': 0}, 'repeats'),
        ({'generator': 'linear', 'n': 10, 'test_fraction': 1.0}, 'test_fraction'),
        ({'generator': 'linear', 'n': 10, 'lambda_grid': [1.5]}, 'lambda_grid'),
        ({'generator': 'linear', 'n': 10, 'sigma_grid': [0.5]}, 'sigma_grid'),
        ({'generator': 'file'}, 'truth_path'),
        ({'generator': 'linear', 'n': 10, 'version': 2}, 'version'),
        ({'generator': 'linear', 'n': 10, 'include_rc': False, 'eta_grid': []}, 'include_rc'),
        ({'generator': 'clustered', 'score_spread': 0.0}, 'score_spread'),
    ])
    def test_invalid(self, data, key):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict(data)
        assert info.value.key == key

    def test_features_enable_diffusion(self):
        config = RunConfig.from_dict({'generator': 'exp-b', 'n': 50, 'decayed_sigma_grid': [0.5]})
        assert config.has_features


class TestLoadRunConfig:

    def test_relative_paths_resolve_against_file(self, tmp_path):
        (tmp_path / 'configs').mkdir()
        path = write_config(tmp_path / 'configs', {'generator': 'file', 'truth_path': 'truth.csv'})
        config = load_run_config(path)
        assert config.truth_path == str(tmp_path / 'configs' / 'truth.csv')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"generator": ')
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_top_level_must_be_object(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(write_config(tmp_path, [1, 2, 3]))
