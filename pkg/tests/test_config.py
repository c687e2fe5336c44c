import pytest

from comstab import config
from comstab.errors import ConfigError


def test_defaults_roundtrip_through_yaml():
    cfg = config.loads(config.dumps_defaults())
    assert cfg.to_dict() == config.defaults()


def test_every_key_has_a_known_tag():
    def walk(schema):
        for spec in schema.values():
            if isinstance(spec, dict):
                yield from walk(spec)
            else:
                yield spec
    assert {k.tag for k in walk(config.SCHEMA)} <= {"given", "derived", "chosen"}
    assert len(config.describe()) == sum(1 for _ in walk(config.SCHEMA))


def test_empty_text_gives_defaults():
    assert config.loads("").to_dict() == config.defaults()


def test_partial_override_keeps_the_rest():
    cfg = config.loads("steering:\n  duration: 2\n")
    assert cfg.steering.duration == 2.0 and isinstance(cfg.steering.duration, float)
    assert cfg.steering.kp0 == 15.0
    assert cfg["gait"]["stride_length"] == 0.4


@pytest.mark.parametrize("text,line", [
    ("seed: 1\nbogus: 2\n", 2),
    ("steering:\n  duration: 1.0\n  typo_gain: 3\n", 3),
    ("walking:\n  duration: fast\n", 2),
    ("gait: 5\n", 1),
    ("steering:\n  controllers: pid\n", 2),
    ("seed: [1, 2\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as exc:
        config.loads(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_bool_is_not_a_number():
    with pytest.raises(ConfigError):
        config.loads("seed: true\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        config.load(tmp_path / "absent.yaml")
    assert config.load(None).to_dict() == config.defaults()


def test_output_dir_env_override(monkeypatch):
    cfg = config.loads("output_dir: here\n")
    monkeypatch.delenv(config.OUTPUT_ENV, raising=False)
    assert cfg.output_dir == "here"
    monkeypatch.setenv(config.OUTPUT_ENV, "/tmp/elsewhere")
    assert cfg.output_dir == "/tmp/elsewhere"


def test_unknown_attribute():
    with pytest.raises(AttributeError):
        config.loads("").nothing
