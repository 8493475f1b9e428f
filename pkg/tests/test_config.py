import pytest

from runtime import __version__
from runtime.config import RunConfig, load_config, parse_formats, parse_grid, parse_int_list
from runtime.errors import UsageError


def test_defaults():
    config = RunConfig()
    assert config.g_list == (1, 5, 20)
    assert config.r_grid == (0.2, 5.0, 20)
    assert config.t_resolution == 200
    assert config.formats == ("json", "csv")
    assert config.config_version == __version__
    spec = config.quadrature_spec()
    assert spec.abs_tol == 1e-11 and spec.rel_tol == 1e-10


def test_parsers():
    assert parse_grid("0.5:2:4") == (0.5, 2.0, 4)
    assert parse_grid([1, 2, 3]) == (1.0, 2.0, 3)
    assert parse_int_list("1, 5,20") == (1, 5, 20)
    assert parse_int_list(3) == (3,)
    assert parse_formats("CSV") == ("csv",)


@pytest.mark.parametrize("bad", ["1:2", "a:b:c", "2:1:5", "0:1:1"])
def test_bad_grid(bad):
    with pytest.raises(UsageError):
        parse_grid(bad)


def test_bad_lists():
    with pytest.raises(UsageError):
        parse_int_list("1,x")
    with pytest.raises(UsageError):
        parse_formats("json,xml")
    with pytest.raises(UsageError):
        parse_formats("")


def test_load_yaml_file(tmp_path):
    path = tmp_path / "gav.yml"
    path.write_text("g_list: 2,3\nr_grid: '1:2:3'\nbound_resolution: 12\nconvention: Both\n")
    config = load_config(path, environ={})
    assert config.g_list == (2, 3)
    assert config.r_grid == (1.0, 2.0, 3)
    assert config.bound_resolution == 12
    assert config.convention == "both"


def test_empty_yaml_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert load_config(path, environ={}) == RunConfig()


def test_nested_mapping_rejected(tmp_path):
    path = tmp_path / "nested.yml"
    path.write_text("quadrature:\n  abs_tol: 1e-9\n")
    with pytest.raises(UsageError):
        load_config(path, environ={})


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(UsageError):
        load_config(path, environ={})


def test_unknown_key_and_missing_file(tmp_path):
    path = tmp_path / "gav.yml"
    path.write_text("colour: red\n")
    with pytest.raises(UsageError):
        load_config(path, environ={})
    with pytest.raises(UsageError):
        load_config(tmp_path / "missing.yml", environ={})


def test_precedence_file_env_flags(tmp_path):
    path = tmp_path / "gav.yml"
    path.write_text("output_dir: from-file\nthreads: 2\n")
    config = load_config(path, environ={"GAV_OUTPUT_DIR": "from-env"})
    assert config.output_dir == "from-env"
    assert config.threads == 2
    config = load_config(path, {"output_dir": "from-flag", "threads": None},
                         environ={"GAV_OUTPUT_DIR": "from-env"})
    assert config.output_dir == "from-flag"
    assert config.threads == 2


@pytest.mark.parametrize("override", [
    {"config_version": "2.0"},
    {"config_version": "not a version"},
    {"r_grid": "0.1:5:3"},
    {"catenoid_c": 0.3},
    {"convention": "sideways"},
    {"g_list": "0"},
    {"t_resolution": 1},
])
def test_invalid_values(override):
    with pytest.raises(UsageError):
        RunConfig().with_overrides(override)


def test_echo_round_trip():
    config = RunConfig(g_list=(2,), threads=3)
    echo = config.echo()
    assert echo["g_list"] == [2]
    assert RunConfig.from_echo(echo) == config
