import pytest
from pathlib import Path

from engine.config import ConfigError, ConfigManager, QuadratureOptions


def test_defaults_and_roundtrip(tmp_path):
    cfg_path = tmp_path / 'config.yaml'
    cm = ConfigManager(config_path=str(cfg_path))
    cfg = cm.load_config()
    assert cfg['sim']['small_jump'] == 'gaussian-completion'
    cfg['sim']['epsilon'] = 0.05
    cfg['logging']['level'] = 'DEBUG'
    cm.save_config(cfg)
    cm2 = ConfigManager(config_path=str(cfg_path))
    loaded = cm2.load_config()
    assert loaded['sim']['epsilon'] == 0.05
    assert loaded['logging']['level'] == 'DEBUG'


def test_load_missing_returns_defaults(tmp_path):
    cfg_path = tmp_path / 'missing.yaml'
    cm = ConfigManager(config_path=str(cfg_path))
    assert cm.load_config() == cm.get_default_config()
    assert cm.validate_config() == []


def test_partial_file_is_merged(tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('quadrature:\n  epsrel: 1.0e-6\n')
    cm = ConfigManager(config_path=str(cfg_path))
    cm.load_config()
    quad = cm.get_quadrature()
    assert quad == QuadratureOptions(epsabs=1e-12, epsrel=1e-6, limit=200)
    assert cm.get('sim.chunk_size') == 50000


def test_legacy_thread_key_is_migrated(tmp_path, monkeypatch):
    monkeypatch.delenv('TS_NUM_THREADS', raising=False)
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('sim:\n  threads: 3\nthreads: {}\n')
    cm = ConfigManager(config_path=str(cfg_path))
    cfg = cm.load_config()
    assert 'threads' not in cfg['sim']
    assert cm.get_max_workers() == 3


def test_thread_env_overrides_file(tmp_path, monkeypatch):
    cm = ConfigManager(config_path=str(tmp_path / 'missing.yaml'))
    monkeypatch.setenv('TS_NUM_THREADS', '2')
    assert cm.get_max_workers() == 2
    monkeypatch.setenv('TS_NUM_THREADS', 'many')
    assert cm.get_max_workers() == 4


def test_validate_config_reports_bad_values(tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('sim:\n  epsilon: -1\n  small_jump: none\nquadrature:\n  limit: 0\n')
    cm = ConfigManager(config_path=str(cfg_path))
    cm.load_config()
    errors = cm.validate_config()
    assert "sim.epsilon must be positive" in errors
    assert "quadrature.limit must be at least 1" in errors
    assert any('small_jump' in e for e in errors)


def test_charfn_options(tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('charfn:\n  fd_step: 0.01\n')
    cm = ConfigManager(config_path=str(cfg_path))
    assert cm.get_charfn_options() == {'filon_threshold': 50.0, 'h': 0.01, 'levels': 3}
    cm.get_config()['charfn']['richardson_levels'] = 0
    assert "charfn.richardson_levels must be at least 1" in cm.validate_config()


def test_corrupt_yaml_raises(tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('[')
    cm = ConfigManager(config_path=str(cfg_path))
    with pytest.raises(ConfigError):
        cm.load_config()


def test_non_mapping_root_raises(tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('- 1\n- 2\n')
    with pytest.raises(ConfigError):
        ConfigManager(config_path=str(cfg_path)).load_config()


def test_permission_error(monkeypatch, tmp_path):
    cfg_path = tmp_path / 'cfg.yaml'
    cfg_path.write_text('x')
    cm = ConfigManager(config_path=str(cfg_path))

    def bad_open(*a, **k):
        raise PermissionError("nope")

    monkeypatch.setattr(Path, 'open', lambda self, *a, **k: bad_open())
    with pytest.raises(ConfigError):
        cm.load_config()
