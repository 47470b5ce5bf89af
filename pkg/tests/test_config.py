import pytest

from cashflow_savings.config import (SEED_STREAMS, derive_seed, header_line, load_config,
                                     parse_header, validate_config)
from cashflow_savings.errors import ValidationError
from cashflow_savings.policy import DAILY

MINIMAL = 'input = "flows.csv"\n'


def test_minimal_defaults():
    cfg = validate_config(MINIMAL)
    assert cfg.seed == 0 and cfg.g_fraction == 0.65 and cfg.H == 100
    assert cfg.risk_levels == [0.05, 0.10, 0.15]
    assert cfg.workdays_per_year == 250 and cfg.fold_stride == 1 and cfg.fixed_origin
    assert cfg.model.family == "mean" and cfg.costs.shortage_basis == DAILY
    assert len(cfg.cost_structures()) == 21
    assert cfg.label == "flows"


def test_missing_input():
    with pytest.raises(ValidationError, match="input"):
        validate_config("seed = 1\n")


def test_range_error_names_field():
    with pytest.raises(ValidationError, match="g_fraction"):
        validate_config(MINIMAL + "g_fraction = 1.2\n")


def test_unknown_key_named():
    with pytest.raises(ValidationError, match="features.day_of_weak: unknown key"):
        validate_config(MINIMAL + "[features]\nday_of_weak = true\n")


def test_type_mismatch_carries_path():
    with pytest.raises(ValidationError, match="model.hyper"):
        validate_config(MINIMAL + '[model]\nfamily = "rf"\nhyper = { a = "ten" }\n')
    with pytest.raises(ValidationError, match="H"):
        validate_config(MINIMAL + 'H = "long"\n')


def test_unknown_hyperparameter():
    with pytest.raises(ValidationError, match="unknown hyperparameter"):
        validate_config(MINIMAL + '[model]\nfamily = "rf"\nhyper = { K = 3 }\n')


def test_bad_toml():
    with pytest.raises(ValidationError, match="TOML"):
        validate_config("input = \n")


def test_risk_levels():
    cfg = validate_config(MINIMAL + "risk_levels = [0.05]\n")
    assert cfg.risk_levels == [0.05]
    for bad in ("[]", "[1.5]", "[0.0]"):
        with pytest.raises(ValidationError, match="risk_levels"):
            validate_config(MINIMAL + f"risk_levels = {bad}\n")


def test_sweep_grid_checked():
    with pytest.raises(ValidationError, match="sorted"):
        validate_config(MINIMAL + "[sweep]\nsigma_multipliers = [1.0, 0.5]\n")


def test_grid_expands():
    cfg = validate_config(MINIMAL + '[features]\nday_of_week = true\n[model]\nfamily = "rf"\n'
                          'hyper = { a = [5, 10], c = [10, 50] }\n')
    assert cfg.model.is_grid and len(cfg.candidates()) == 4
    with pytest.raises(ValidationError, match="grid"):
        cfg.model_spec()
    single = validate_config(MINIMAL + '[features]\nday_of_week = true\n[model]\n'
                             'family = "rf"\nhyper = { a = 5 }\n')
    assert single.model_spec().hyper["a"] == 5


def test_custom_costs():
    cfg = validate_config(MINIMAL + '[costs]\nscenarios = []\n'
                          '[[costs.custom]]\nname = "bank"\nholding = 0.1\nshortage = 0.2\n')
    (c,) = cfg.cost_structures()
    assert c.name == "bank" and c.holding == 0.1
    with pytest.raises(ValidationError, match="no cost structures"):
        validate_config(MINIMAL + "[costs]\nscenarios = []\n")


def test_hash_stable_and_sensitive():
    a = validate_config(MINIMAL)
    assert a.config_hash() == validate_config(MINIMAL).config_hash()
    assert a.config_hash() == validate_config(MINIMAL + 'output_dir = "x"\n').config_hash()
    assert a.config_hash() != validate_config(MINIMAL + "H = 50\n").config_hash()


def test_header_round_trip():
    cfg = validate_config(MINIMAL + "seed = 9\n")
    line = "# " + header_line(cfg, "2024-01-01T00:00:00Z")
    assert parse_header(line) == (9, cfg.config_hash(), "2024-01-01T00:00:00Z")
    with pytest.raises(ValidationError):
        parse_header("date,amount")


def test_seed_override_changes_hash(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(MINIMAL + "seed = 1\n")
    base = load_config(p)
    over = load_config(p, {"seed": 4})
    assert over.seed == 4 and base.config_hash() != over.config_hash()
    assert over.input_path == tmp_path / "flows.csv"
    with pytest.raises(ValidationError, match="cannot read"):
        load_config(tmp_path / "missing.toml")


def test_derived_seeds():
    assert derive_seed(3, "bootstrap") == derive_seed(3, "bootstrap")
    seeds = {derive_seed(3, s) for s in SEED_STREAMS}
    assert len(seeds) == len(SEED_STREAMS)
    assert derive_seed(3, "sweep") != derive_seed(4, "sweep")
    cfg = validate_config(MINIMAL + '[variant]\nname = "RandomShock"\nseed = 12\n')
    assert cfg.variant_seed() == 12
