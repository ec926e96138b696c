import math

import pytest

from plasmon_emit import ParseError
from plasmon_emit.config import (
    JAGR_TAU0_FS,
    PRESETS,
    RunConfig,
    echo_config,
    parse_config,
    parse_init,
)


def test_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.M == 1001 and cfg.band == (3.5, 4.5)
    assert cfg.t_max_fs == 500.0 and cfg.dt_out_fs == 0.25


def test_comments_and_whitespace():
    text = "# header\n\n  omega0_ev = 4.16   # trailing\nfca=true\n"
    cfg = parse_config(text)
    assert cfg.omega0_ev == 4.16 and cfg.fca is True


def test_echo_roundtrip():
    cfg = parse_config("scenario = fig9-ais\nM = 401\ninit = custom:0.6,0,0,0.8\nsolver = eigen\n")
    assert parse_config(echo_config(cfg)) == cfg


def test_negative_tau0_names_key():
    with pytest.raises(ParseError) as info:
        parse_config("omega0_ev = 3.84\ntau0_fs = -1\n")
    assert info.value.key == "tau0_fs"
    assert info.value.line == 2
    assert "tau0_fs" in str(info.value)


def test_unknown_key():
    with pytest.raises(ParseError) as info:
        parse_config("radius_nm = 5\nwavelength = 3\n")
    assert info.value.key == "wavelength" and info.value.line == 2


@pytest.mark.parametrize(
    "text, key",
    [
        ("M = 3.5", "M"),
        ("fca = maybe", "fca"),
        ("omega0_ev = abc", "omega0_ev"),
        ("solver = rk4", "solver"),
        ("dipole_config = helical", "dipole_config"),
        ("init = custom:1,0,1,0", "init"),
        ("init = state3", "init"),
        ("omega0_ev = 5.0", "omega0_ev"),
        ("scenario = fig99", "scenario"),
    ],
)
def test_malformed_values(text, key):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.key == key


def test_missing_equals():
    with pytest.raises(ParseError) as info:
        parse_config("M 401")
    assert info.value.line == 1


def test_fig4_preset():
    cfg = parse_config("scenario = fig4")
    assert cfg.tau0_fs == JAGR_TAU0_FS == 7e4
    assert cfg.omega0_ev == 3.84 and cfg.D_nm == 2.0 and cfg.init == "state1"


def test_explicit_keys_override_preset():
    cfg = parse_config("D_nm = 1.85\nscenario = fig4\n")
    assert cfg.D_nm == 1.85 and cfg.tau0_fs == 7e4


def test_overrides():
    cfg = parse_config("M = 401", ["M=201", "fca=yes"])
    assert cfg.M == 201 and cfg.fca
    with pytest.raises(ParseError):
        parse_config("", ["M"])
    with pytest.raises(ParseError):
        parse_config("", ["nope=1"])


def test_every_figure_has_presets():
    names = set(PRESETS)
    for fig in range(2, 14):
        assert any(n == f"fig{fig}" or n.startswith(f"fig{fig}-") for n in names), fig
    for name in PRESETS:
        parse_config(f"scenario = {name}")


def test_typo_flagged_in_presets():
    notes = " ".join(note for _, note in PRESETS.values())
    assert "2.83e5" in notes


def test_parse_init():
    assert parse_init("sis") == (math.sqrt(0.5), math.sqrt(0.5))
    assert parse_init("ais")[1].real == -math.sqrt(0.5)
    assert parse_init("custom:0,0.6,0.8,0") == (0.6j, 0.8)


def test_linear_config_ignores_second_amplitude():
    cfg = parse_config("dipole_config = linear_radial\ninit = custom:1,0,0.5,0\n")
    assert cfg.emitter().initial_amplitudes == (1, 0)
    with pytest.raises(ParseError):
        parse_config("dipole_config = linear_radial\ninit = sis\n")
