import hashlib

import pytest

from mollicrit.config import KNOWN_KEYS, load_config, mollifier_config, parse_config
from mollicrit.errors import ConfigError
from mollicrit.mollikit import feng_polynomials_default

GOOD = """
# comment line
mollifier.T = 3000       # trailing comment
mollifier.R = 1.25
mollifier.K = 7
mollifier.kind = feng
mollifier.Q0 = 1, -0.5
mollifier.Q0.center = 0.5
gfun.alpha = 0.5
"""


def test_parse_good():
    cf = parse_config(GOOD, "x.cfg")
    assert cf.get("mollifier.T") == 3000.0
    assert cf.get("mollifier.K") == 7 and isinstance(cf.get("mollifier.K"), int)
    assert cf.get("mollifier.Q0") == (1.0, -0.5)
    assert cf.get("mollifier.kind") == "feng"
    assert cf.digest == hashlib.sha256(GOOD.encode()).hexdigest()
    assert cf.path == "x.cfg"


@pytest.mark.parametrize("text,fragment", [
    ("mollifier.T = 2000\nbogus.key = 1\n", "line 2: unknown key"),
    ("mollifier.T = 1\nmollifier.T = 2\n", "line 2: mollifier.T given twice"),
    ("mollifier.R = abc\n", "line 1: mollifier.R expects a real number"),
    ("mollifier.K = 2.5\n", "line 1: mollifier.K expects an integer"),
    ("mollifier.kind = other\n", "line 1: mollifier.kind must be one of"),
    ("this is not a pair\n", "line 1: expected 'key = value'"),
    ("mollifier.P2 = 1,,2\n", "line 1: mollifier.P2 expects a comma list"),
])
def test_parse_errors_name_the_line(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_parse_collects_all_errors():
    with pytest.raises(ConfigError) as exc:
        parse_config("a.b = 1\nmollifier.R = x\n")
    assert "line 1" in str(exc.value) and "line 2" in str(exc.value)


def test_load_missing_and_binary(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")
    bad = tmp_path / "bin.cfg"
    bad.write_bytes(b"\xff\xfe\x00garbage")
    with pytest.raises(ConfigError):
        load_config(bad)
    assert load_config(None).values == {}


def test_mollifier_config_overrides():
    cfg = mollifier_config(parse_config(GOOD))
    assert cfg.T == 3000.0 and cfg.R == 1.25 and cfg.K == 7
    assert cfg.Q0(0.5) == 1.0 and cfg.Q0(1.5) == 0.5
    assert mollifier_config(parse_config(GOOD), T=500.0).T == 500.0


def test_mollifier_config_defaults_match_builtin():
    a, b = mollifier_config(parse_config("")), feng_polynomials_default(2000.0)
    assert a == b


def test_polynomial_list_replaces_defaults():
    cfg = mollifier_config(parse_config("mollifier.P1 = 0, 1\nmollifier.P2 = 0, 0.5\n"))
    assert cfg.I == 2


def test_polynomial_gap_rejected():
    with pytest.raises(ConfigError, match="without gaps"):
        mollifier_config(parse_config("mollifier.P1 = 0, 1\nmollifier.P3 = 0, 0.5\n"))


def test_invalid_combination_rejected():
    with pytest.raises(ConfigError):
        mollifier_config(parse_config("mollifier.theta = 0.9\n"))


def test_known_keys_cover_dataclass_fields():
    for name in ("T", "theta", "theta1", "R", "alpha", "epsilon1", "K", "K0", "kind", "g_kind", "delta_mode",
                 "Q_tilde", "Q0"):
        assert "mollifier." + name in KNOWN_KEYS
    assert {"gfun.alpha", "gfun.T", "gfun.N_truncation", "shift.delta_sigma"} <= KNOWN_KEYS


@pytest.mark.parametrize("name", ["default.cfg", "identity.cfg", "alpha7.cfg"])
def test_shipped_configs_parse(name):
    from pathlib import Path

    cf = load_config(Path(__file__).resolve().parents[1] / "configs" / name)
    mollifier_config(cf)
