"""
Tests for run-file parsing and configuration precedence.
"""

from pathlib import Path

import pytest

from config.loader import (
    build_run_config,
    load_run_config,
    parse_config_text,
    require_paths,
    with_overrides,
)
from config.settings import DEFAULT_HMC
from utils.errors import ConfigurationError

RUN_FILE = """
# county clustering run
county = data/county.csv   # trailing comment
chains = 2
linkage = complete
columns.vaccinated = RECVDVACC
"""


def test_parse_config_text():
    values = parse_config_text(RUN_FILE)
    assert values == {
        'county': 'data/county.csv',
        'chains': '2',
        'linkage': 'complete',
        'columns.vaccinated': 'RECVDVACC',
    }


@pytest.mark.parametrize("text", ["chains 4", "= 4", "chains = 2\nchains = 3"])
def test_parse_config_text_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_config_text(text)


def test_defaults():
    config = build_run_config()
    assert config.chains == DEFAULT_HMC['chains']
    assert config.linkage == 'ward'
    assert config.workers >= 1
    assert config.out_dir == Path('output')


def test_flags_override_file():
    config = build_run_config(parse_config_text(RUN_FILE), {'chains': 3, 'seed': None})
    assert config.chains == 3
    assert config.seed == 0
    assert config.linkage == 'complete'
    assert config.county == Path('data/county.csv')
    assert config.column_map['vaccinated'] == 'RECVDVACC'


def test_unknown_keys_rejected():
    with pytest.raises(ConfigurationError, match='Unknown config key'):
        build_run_config({'chain': '4'})
    with pytest.raises(ConfigurationError):
        build_run_config({'columns.shoe_size': 'X'})


@pytest.mark.parametrize("overrides", [
    {'chains': 0},
    {'iterations': 50},
    {'reference_draws': 5},
    {'n_records': 0},
    {'seed': -1},
    {'linkage': 'single'},
    {'chains': 'four'},
])
def test_out_of_range_settings(overrides):
    with pytest.raises(ConfigurationError):
        build_run_config(overrides=overrides)


def test_digest_ignores_workers_and_out_dir():
    first = build_run_config(overrides={'workers': 1, 'out_dir': 'a'})
    second = build_run_config(overrides={'workers': 4, 'out_dir': 'b'})
    assert first.digest == second.digest
    assert first.digest != build_run_config(overrides={'workers': 1, 'seed': 1}).digest


def test_digest_stable_across_sources(tmp_path):
    run_file = tmp_path / 'run.cfg'
    run_file.write_text("seed = 5\nchains = 2\n", encoding='utf-8')
    from_file = load_run_config(run_file, {'workers': 1})
    from_flags = build_run_config(overrides={'seed': 5, 'chains': 2, 'workers': 1})
    assert from_file.digest == from_flags.digest


def test_missing_run_file(tmp_path):
    with pytest.raises(ConfigurationError, match='not found'):
        load_run_config(tmp_path / 'absent.cfg')


def test_require_paths(tmp_path):
    present = tmp_path / 'county.csv'
    present.write_text("state,county,rate_percent\n", encoding='utf-8')
    config = build_run_config(overrides={'county': present, 'survey': tmp_path / 'none.csv'})

    assert require_paths(config, 'county') is config
    with pytest.raises(ConfigurationError, match='none.csv'):
        require_paths(config, 'survey')
    with pytest.raises(ConfigurationError, match='No truth file'):
        require_paths(config, 'truth')


def test_with_overrides_revalidates():
    config = build_run_config(overrides={'workers': 1})
    assert with_overrides(config, k_max=4).k_max == 4
    with pytest.raises(ConfigurationError):
        with_overrides(config, chains=0)
