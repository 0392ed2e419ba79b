from pathlib import Path

import pytest

from vexnorm.config import SWEEPABLE, load_config, parse_config
from vexnorm.errors import ConfigurationError


ROOT = Path(__file__).resolve().parent.parent


def test_defaults():
    config = parse_config("version = 1\n")
    assert config.grid.n == 1
    assert config.grid.level == 8
    assert config.space.alpha is None
    assert config.operator.engine == "fft"
    assert config.checks.run == []


def test_aliases_and_symbol_shorthand():
    config = parse_config("""
version = 1
[grid]
L = 9
[space]
lambda = 0.3
[operator]
symbol = "sign"
""")
    assert config.grid.level == 9
    assert config.space.lam == 0.3
    assert config.symbol().kind == "sign"


def test_symbol_table():
    config = parse_config('version = 1\n[operator]\nsymbol = { kind = "log", scale = 3.0 }\n')
    assert config.symbol().scale == 3.0


def test_parse_error_names_the_line():
    with pytest.raises(ConfigurationError, match="line 2"):
        parse_config("version = 1\n[grid\n")


def test_beta_outside_the_dimension_range():
    with pytest.raises(ConfigurationError, match=r"operator\.beta=1\.5"):
        parse_config("version = 1\n[operator]\nbeta = 1.5\n")
    config = parse_config("version = 1\n[grid]\nn = 2\n[operator]\nbeta = 1.5\n")
    assert config.operator.beta == 1.5


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigurationError, match=r"grid\.spacing"):
        parse_config("version = 1\n[grid]\nspacing = 0.1\n")
    with pytest.raises(ConfigurationError, match="plotting"):
        parse_config("version = 1\n[plotting]\ndpi = 10\n")


@pytest.mark.parametrize("text", [
    "",
    "version = 2\n",
    "version = 1\n[grid]\nn = 3\n",
    "version = 1\n[grid]\nk_min = 2\nk_max = 2\n",
    "version = 1\n[space]\np1 = 2.0\np2 = 1.0\n",
    "version = 1\n[space]\nlambda = -0.1\n",
    "version = 1\n[operator]\nengine = \"gpu\"\n",
    "version = 1\n[operator]\nm = -1\n",
    "version = 1\n[checks]\nrun = [\"everything\"]\n",
    "version = 1\n[family]\nkinds = [\"wavelets\"]\n",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


def test_unknown_exponent_family():
    with pytest.raises(ConfigurationError, match=r"exponent\.q1"):
        parse_config('version = 1\n[exponent]\nq1 = { family = "spline" }\n')


def test_with_value():
    config = parse_config("version = 1\n")
    assert config.with_value("L", 9).grid.level == 9
    assert config.with_value("lambda", 0.4).space.lam == 0.4
    assert config.with_value("alpha", -0.1).space.alpha == -0.1
    assert config.with_value("m", 2).operator.m == 2
    assert config.grid.level == 8
    with pytest.raises(ConfigurationError):
        config.with_value("k_max", -4)
    assert set(SWEEPABLE) == {"alpha", "lambda", "beta", "m", "L", "k_max"}


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.toml")


@pytest.mark.parametrize("path", sorted((ROOT / "example_configs").glob("*.toml"))
                         + [ROOT / "vexnorm" / "configs" / "selftest.toml"], ids=lambda p: p.name)
def test_bundled_configs_are_valid(path):
    assert load_config(path).version == 1
