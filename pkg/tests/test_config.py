from dataclasses import fields, replace

import pytest

from fpa.config import (
    ExperimentConfig,
    apply_overrides,
    load_config,
    parse_config,
    serialize_config,
)


def test_round_trip_default():
    config = ExperimentConfig()
    assert parse_config(serialize_config(config)) == config


def test_round_trip_modified():
    config = replace(
        ExperimentConfig(),
        problems=("sphere",),
        dimension=2,
        switch_probability=0.25,
        epsilon=1e-6,
        variant="simplified",
        accept_on_equal=False,
        flip_branch=True,
        formats=("json",),
        out_dir="results/run1",
    )
    assert parse_config(serialize_config(config)) == config


def test_serialized_form_is_stable():
    text = serialize_config(ExperimentConfig())
    lines = text.splitlines()
    assert text.endswith("\n")
    assert len(lines) == len(fields(ExperimentConfig))
    assert [line.split(" = ")[0] for line in lines] == [
        f.name for f in fields(ExperimentConfig)
    ]
    assert lines[0] == "problems = ackley,rosenbrock,sphere,yang-forest,zakharov"
    assert "accept_on_equal = true" in lines
    assert "flip_branch = false" in lines


def test_comments_and_blank_lines_skipped():
    config = parse_config("# a comment\n\n  seed = 7\n\n# another\ndimension = 2\n")
    assert config.seed == 7
    assert config.dimension == 2


def test_unknown_key_reports_line_number():
    with pytest.raises(ValueError, match=r"line 3: unknown config key 'sed'"):
        parse_config("seed = 1\n\nsed = 2\n")


def test_missing_equals_rejected():
    with pytest.raises(ValueError, match="expected key = value"):
        parse_config("seed 1\n")


def test_bad_int_value():
    with pytest.raises(ValueError, match="line 1: bad value for seed"):
        parse_config("seed = seven\n")


def test_bad_float_value():
    with pytest.raises(ValueError, match="bad value for epsilon"):
        parse_config("epsilon = tiny\n")


def test_bools_only_accept_true_false():
    # "1" must not be coerced through the int path
    with pytest.raises(ValueError, match="bad value for accept_on_equal"):
        parse_config("accept_on_equal = 1\n")
    assert parse_config("flip_branch = TRUE\n").flip_branch is True


def test_invalid_variant_rejected():
    with pytest.raises(ValueError, match="variant"):
        parse_config("variant = annealed\n")


def test_empty_problems_rejected():
    with pytest.raises(ValueError, match="at least one objective"):
        parse_config("problems =\n")


def test_unknown_format_rejected():
    with pytest.raises(ValueError, match="unknown output format"):
        parse_config("formats = xml\n")
    with pytest.raises(ValueError, match="formats"):
        parse_config("formats =\n")


def test_fpa_params_mirror_config():
    config = replace(
        ExperimentConfig(),
        population_size=13,
        switch_probability=0.4,
        step_scale=0.5,
        levy_tail_exponent=1.9,
        levy_min_step=0.02,
        levy_scale=2.0,
        max_iterations=17,
        seed=99,
        variant="simplified",
        accept_on_equal=False,
        flip_branch=True,
        levy_per_coordinate=False,
    )
    params = config.fpa_params()
    assert params.population_size == 13
    assert params.switch_probability == 0.4
    assert params.step_scale == 0.5
    assert params.levy.tail_exponent == 1.9
    assert params.levy.min_step == 0.02
    assert params.levy.scale == 2.0
    assert params.max_iterations == 17
    assert params.seed == 99
    assert params.variant == "simplified"
    assert params.accept_on_equal is False
    assert params.flip_branch is True
    assert params.levy_per_coordinate is False


def test_apply_overrides():
    base = ExperimentConfig()
    merged = apply_overrides(
        base, problem="sphere", seed=5, out="elsewhere", fmt="csv , json"
    )
    assert merged.problems == ("sphere",)
    assert merged.seed == 5
    assert merged.out_dir == "elsewhere"
    assert merged.formats == ("csv", "json")


def test_apply_overrides_without_flags_is_identity():
    base = ExperimentConfig()
    assert apply_overrides(base) is base


def test_load_config_reads_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("seed = 11\nnum_runs = 3\n", encoding="utf-8")
    config = load_config(path)
    assert config.seed == 11
    assert config.num_runs == 3
