"""
Beállítás kezelés tesztek
"""
import json

import pytest

from config.settings import Settings


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'solver_tolerance': 1e-10}))
    monkeypatch.setenv('MBT_QVE_SETTINGS', str(path))
    yield path
    Settings.reload()


class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.setenv('MBT_QVE_SETTINGS', 'nonexistent/settings.json')
        assert Settings.get_setting('near_singular_ratio') == 0.5
        assert Settings.get_setting('missing_key', 'fallback') == 'fallback'

    def test_file_overrides_defaults(self, settings_file):
        assert Settings.get_setting('solver_tolerance') == 1e-10
        assert Settings.get_setting('newton_max_iterations') == 100

    def test_merged_settings_are_cached(self, settings_file, mocker):
        Settings.get_system_settings()
        load = mocker.spy(Settings, '_load_settings')
        for _ in range(5):
            Settings.get_setting('pivot_tolerance')
            Settings.resolve({}, 'power_tolerance')
        assert load.call_count == 0

    def test_environment_change_invalidates_cache(self, settings_file, monkeypatch):
        Settings.get_system_settings()
        monkeypatch.setenv('MBT_QVE_SEED', '77')
        assert Settings.get_setting('default_seed') == 77
        monkeypatch.delenv('MBT_QVE_SEED')
        assert Settings.get_setting('default_seed') == Settings.DEFAULT_SETTINGS['default_seed']

    def test_reload_picks_up_file_changes(self, settings_file):
        assert Settings.get_setting('solver_tolerance') == 1e-10
        settings_file.write_text(json.dumps({'solver_tolerance': 1e-12}))
        assert Settings.get_setting('solver_tolerance') == 1e-10
        assert Settings.reload()['solver_tolerance'] == 1e-12

    def test_returned_dict_is_a_copy(self, settings_file):
        Settings.get_system_settings()['solver_tolerance'] = 1.0
        assert Settings.get_setting('solver_tolerance') == 1e-10

    def test_invalid_environment_value_is_ignored(self, settings_file, monkeypatch):
        monkeypatch.setenv('MBT_QVE_SEED', 'not-a-number')
        assert Settings.get_setting('default_seed') == Settings.DEFAULT_SETTINGS['default_seed']

    def test_component_config_wins(self, settings_file):
        assert Settings.resolve({'solver_tolerance': 1e-6}, 'solver_tolerance') == 1e-6
        assert Settings.resolve(None, 'solver_tolerance') == 1e-10

    def test_settings_are_read_only(self):
        assert not hasattr(Settings, 'update_system_settings')
