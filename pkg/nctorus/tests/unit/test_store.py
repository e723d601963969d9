import pytest

from nctorus.core.algebra import Element
from nctorus.core.errors import ConfigError, DimensionMismatchError
from nctorus.core.phases import FloatTheta, ThetaData, UnitPhase
from nctorus.core.weights import WeightKind
from nctorus.io.store import (
    build_theta,
    build_weight,
    config_from_dict,
    element_from_list,
    element_to_list,
    load_config,
    load_element,
)


def _theta_dict(**extra):
    data = {"theta": {"n": 2, "vartheta": [{"k": 2, "j": 1, "r0": [1, 2]}]}}
    data.update(extra)
    return data


def test_load_default_config():
    config = load_config("config.json")
    theta = build_theta(config)
    assert isinstance(theta, ThetaData)
    assert theta.n == 2
    assert theta.angle(2, 1) == UnitPhase.of(0, {0: 1})
    weight = build_weight(config)
    assert weight.kind is WeightKind.SUBEXPONENTIAL
    assert config.tolerances.truncation_n == 6


def test_load_rational_and_float_configs():
    rational = build_theta(load_config("configs/rational.json"))
    assert rational.is_rational
    assert rational.angle(3, 1) == UnitPhase.of([1, 3])
    assert load_config("configs/rational.json").seed == 7

    float_config = load_config("configs/float.json")
    assert float_config.theta.float_mode
    theta = build_theta(float_config)
    assert isinstance(theta, FloatTheta)
    assert theta.values[0][1] == pytest.approx(2**0.5 - 1)


def test_float_mode_mixes_exact_entries():
    data = {
        "theta": {
            "n": 3,
            "alphas": [2**0.5],
            "vartheta": [
                {"k": 2, "j": 1, "value": 0.25},
                {"k": 3, "j": 1, "r0": [1, 2], "irr": {"0": [1, 1]}},
            ],
        }
    }
    theta = build_theta(config_from_dict(data))
    assert dict(theta.values)[(3, 1)] == pytest.approx(0.5 + 2**0.5)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


@pytest.mark.parametrize(
    "data",
    [
        _theta_dict(unknown=1),
        {"theta": {"n": 0}},
        {"theta": {"n": 2, "vartheta": [{"k": 2, "j": 1, "r0": [1, 0]}]}},
        {"theta": {"n": 2, "vartheta": [{"k": 2, "j": 1, "r0": [1, 2], "value": 0.5}]}},
        _theta_dict(tolerances={"inversion_tol": 0}),
        _theta_dict(tolerances={"truncation_n": 400}),
        _theta_dict(weight={"kind": "wavelet"}),
    ],
)
def test_schema_violations_raise_config_error(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_semantic_errors_surface_as_config_error():
    duplicate = config_from_dict(
        {
            "theta": {
                "n": 2,
                "vartheta": [{"k": 2, "j": 1, "r0": [1, 2]}, {"k": 2, "j": 1, "r0": [1, 3]}],
            }
        }
    )
    with pytest.raises(ConfigError):
        build_theta(duplicate)
    upper = config_from_dict({"theta": {"n": 2, "vartheta": [{"k": 1, "j": 2, "r0": [1, 2]}]}})
    with pytest.raises(ConfigError):
        build_theta(upper)
    no_alpha = config_from_dict({"theta": {"n": 2, "vartheta": [{"k": 2, "j": 1, "irr": {"0": [1, 1]}}]}})
    with pytest.raises(ConfigError):
        build_theta(no_alpha)
    bad_weight = config_from_dict(_theta_dict(weight={"kind": "exponential", "a": -1.0}))
    with pytest.raises(ConfigError):
        build_weight(bad_weight)


def test_nested_weight_config():
    config = config_from_dict(
        _theta_dict(
            weight={
                "kind": "product",
                "factors": [
                    {"kind": "polynomial", "s": 1.0},
                    {"kind": "custom", "table": [{"x": [1, 0], "value": 3.0}], "fallback": {"kind": "polynomial", "s": 2.0}},
                ],
            }
        )
    )
    weight = build_weight(config)
    assert weight.kind is WeightKind.PRODUCT
    assert weight.factors[1].fallback.kind is WeightKind.POLYNOMIAL


def test_load_elements():
    theta = build_theta(load_config("config.json"))
    f = load_element("elements/geometric.json", theta)
    assert f == Element(theta, {(0, 0): 1.0, (1, 0): -0.5})
    with pytest.raises(ConfigError):
        load_element("elements/duplicate.json", theta)
    with pytest.raises(ConfigError):
        element_from_list(theta, {"x": [0, 0]})
    with pytest.raises(DimensionMismatchError):
        element_from_list(theta, [{"x": [0, 0, 0], "re": 1.0}])
    with pytest.raises(ConfigError):
        element_from_list(theta, [{"x": [0, 0], "re": "one"}])


def test_element_list_form_is_reloadable():
    theta = build_theta(load_config("config.json"))
    f = load_element("elements/mixed.json", theta)
    assert element_from_list(theta, element_to_list(f)) == f
