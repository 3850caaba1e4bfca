import os
import sys
import pytest
import warnings
from pathlib import Path
from contextlib import contextmanager

from marswitch.config import DEBUG
from marswitch.config import parse_value
from marswitch.config import reverse_parse
from marswitch.config import DEFAULT_GLOBAL_CONFIG
from marswitch.config import get_global_config_file
from marswitch.config import set_setting, get_setting
from marswitch.config import _check_settings


@pytest.fixture(autouse=True)
def reset_config_validation_flags():
    # Make sure the config validation is run in each test and that the
    # MARSWITCH_ environment variables are cleared, then restored.
    DEFAULT_GLOBAL_CONFIG["_g_config_check"] = False
    old_env = {
        k: v for k, v in os.environ.items()
        if k.startswith("MARSWITCH_") and k != "MARSWITCH_CONFIG"
    }
    for k in old_env:
        del os.environ[k]
    yield
    DEFAULT_GLOBAL_CONFIG["_g_config_check"] = False
    os.environ.update(old_env)


@contextmanager
def temp_config_file(tmp_path, permission='600'):
    config_file = tmp_path / 'test_config_file.yml'
    if sys.platform != 'win32':
        permission_mode = int(f"100{permission}", base=8)
        config_file.touch(mode=permission_mode, exist_ok=False)
    else:
        config_file.touch(exist_ok=False)
    old_config_file = os.environ.get('MARSWITCH_CONFIG', None)
    os.environ['MARSWITCH_CONFIG'] = str(config_file)
    try:
        yield config_file
    finally:
        if old_config_file is not None:
            os.environ['MARSWITCH_CONFIG'] = old_config_file
        else:
            del os.environ['MARSWITCH_CONFIG']
        config_file.unlink()


def test_parse_value():
    for val in [True, 'true', 'True', '1', 'yes', 'on']:
        assert parse_value(val, True) is True
    for val in ['false', 'False', '0', 'no', 'off']:
        assert parse_value(val, True) is False

    value = "a, b\nc     \n d"
    assert parse_value(value, []) == ['a', 'b', 'c', 'd']

    assert parse_value('3', 1) == 3
    assert parse_value('0.25', 0.1) == 0.25
    assert parse_value('out/', './outputs/') == 'out/'


def test_parse_value_invalid_boolean_warns():
    with pytest.warns(UserWarning, match="could not be parsed"):
        assert parse_value('maybe', False) is False


def test_reverse_parse():
    assert reverse_parse(False, True) == 'true'
    assert reverse_parse(True, 'off') == 'off'
    assert reverse_parse([], ['a', 'b']) == '\na\nb'
    with pytest.raises(AssertionError):
        reverse_parse(True, 'maybe')


@pytest.mark.skipif(sys.platform == 'win32',
                    reason="Skipping Unix-specific test on Windows")
@pytest.mark.parametrize("permission", ["644", "655", "240"])
def test_config_file_permission_warn_unix(tmp_path, permission):
    with temp_config_file(tmp_path, permission) as config_file:
        msg = f"{config_file} is with mode {permission}"
        with pytest.warns(UserWarning, match=msg):
            global_config_file = get_global_config_file()
        assert str(global_config_file) == str(config_file)


@pytest.mark.skipif(sys.platform == 'win32',
                    reason="Skipping Unix-specific test on Windows")
def test_config_file_permission_no_warning(tmp_path):
    with temp_config_file(tmp_path) as config_file:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            global_config_file = get_global_config_file()
        assert str(global_config_file) == str(config_file)


@pytest.mark.parametrize("setting_key", [
    k for k in DEFAULT_GLOBAL_CONFIG if not k.startswith("_")
])
def test_config_file_set(tmp_path, setting_key):
    with temp_config_file(tmp_path):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            default_value = DEFAULT_GLOBAL_CONFIG[setting_key]
            assert get_setting(setting_key) == default_value

            # pick arbitrary new and env values for this configuration
            if isinstance(default_value, (bool, str)):
                set_value = parse_value('True', default_value)
                env_value = parse_value('False', default_value)
            else:
                set_value = parse_value(2 * default_value + 1, default_value)
                env_value = parse_value(3 * default_value + 2, default_value)

            set_setting(setting_key, set_value)
            assert get_setting(setting_key) == set_value

            KEY = f"MARSWITCH_{setting_key.upper()}"
            os.environ[KEY] = str(env_value)
            try:
                assert get_setting(setting_key) == env_value
            finally:
                del os.environ[KEY]


def test_config_file_set_error(tmp_path):
    with temp_config_file(tmp_path):
        with pytest.raises(SystemExit):
            set_setting('invalid_key', None)


def test_global_config_validation(tmp_path):
    with temp_config_file(tmp_path) as config_file:
        config_file.write_text("invalid_key: true\n")

        with pytest.warns(UserWarning, match="invalid_key is set"):
            _check_settings()

        # The check is only run once.
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            _check_settings()


def test_global_config_invalid_env_variable_warns(tmp_path):
    with temp_config_file(tmp_path) as config_file:
        config_file.write_text("debug: false\n")

        os.environ["MARSWITCH_NOT_A_SETTING"] = "1"
        try:
            with pytest.warns(UserWarning, match="not_a_setting is set"):
                _check_settings()
        finally:
            del os.environ["MARSWITCH_NOT_A_SETTING"]


def test_debug_flag_follows_environment(tmp_path, monkeypatch):
    with temp_config_file(tmp_path):
        assert not DEBUG
        monkeypatch.setenv("MARSWITCH_DEBUG", "1")
        assert DEBUG


def test_output_dir_environment_variable(tmp_path, monkeypatch):
    with temp_config_file(tmp_path):
        monkeypatch.setenv("MARSWITCH_OUTPUT_DIR", str(tmp_path / 'out'))
        assert Path(get_setting('output_dir')) == tmp_path / 'out'
