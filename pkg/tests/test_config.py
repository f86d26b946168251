import json

import pytest

from src.core.errors import InvalidTolerance
from src.utils.config import Config, ToleranceConfig, get_app_data_dir, get_config


def test_default_tolerances():
    tol = ToleranceConfig()
    assert (tol.tol_eig, tol.tol_eq, tol.tol_feas, tol.max_iter) == (1e-12, 1e-9, 1e-7, 5000)


@pytest.mark.parametrize('kwargs', [
    dict(tol_eq=0.0),
    dict(tol_feas=-1.0),
    dict(max_iter=0),
    dict(tol_eig=1e-6, tol_feas=1e-7),
])
def test_inconsistent_tolerances_are_rejected(kwargs):
    with pytest.raises(InvalidTolerance):
        ToleranceConfig(**kwargs)


def test_overrides_skip_none():
    tol = ToleranceConfig().with_overrides(tol_eq=1e-6, tol_feas=None)
    assert tol.tol_eq == 1e-6
    assert tol.tol_feas == 1e-7
    assert ToleranceConfig().with_overrides() == ToleranceConfig()


def test_config_file_is_created_with_defaults(config_dir):
    config = Config(config_dir)
    stored = json.loads((config_dir / 'config.json').read_text())
    assert stored == Config.DEFAULTS
    assert config.tolerances() == ToleranceConfig()


def test_config_merges_missing_keys(config_dir):
    (config_dir / 'config.json').write_text(json.dumps({'tol_feas': 1e-6}))
    config = Config(config_dir)
    assert config.tol_feas == 1e-6
    assert config.max_iter == 5000


def test_corrupt_config_falls_back_to_defaults(config_dir):
    (config_dir / 'config.json').write_text('{not json')
    assert Config(config_dir).get_all() == Config.DEFAULTS


def test_setters_clamp_and_persist(config_dir):
    config = Config(config_dir)
    config.jobs = 0
    config.grid_step = 5
    config.solver_restarts = -2
    reloaded = Config(config_dir)
    assert reloaded.jobs == 1
    assert reloaded.grid_step == 0.5
    assert reloaded.solver_restarts == 0


def test_seed_base_prefers_environment(config_dir, monkeypatch):
    config = Config(config_dir)
    config.seed_base = 4
    assert config.seed_base == 4
    monkeypatch.setenv('DWMOD_SEED', '17')
    assert config.seed_base == 17


def test_reset_to_defaults(config_dir):
    config = Config(config_dir)
    config.tol_eq = 1e-5
    config.reset_to_defaults()
    assert config.tol_eq == 1e-9


def test_inconsistent_file_tolerances_surface_on_use(config_dir):
    config = Config(config_dir)
    config.set('tol_eig', 1e-3)
    with pytest.raises(InvalidTolerance):
        config.tolerances()


def test_data_dir_follows_environment(tmp_path, monkeypatch):
    monkeypatch.setenv('DWMOD_HOME', str(tmp_path))
    assert get_app_data_dir() == tmp_path


def test_get_config_reads_the_environment_data_dir(tmp_path, monkeypatch):
    monkeypatch.setenv('DWMOD_HOME', str(tmp_path))
    Config(tmp_path).grid_step = 0.1
    config = get_config()
    assert config.data_dir == tmp_path
    assert config.grid_step == 0.1
