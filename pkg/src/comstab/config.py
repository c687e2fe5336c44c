"""Run configuration: one YAML file, every key documented, unknown keys rejected.

Each key carries a default and a provenance tag:

* ``given``   - value stated for the mechanism or its experiments
* ``derived`` - computed from given values
* ``chosen``  - not stated anywhere; picked here and documented
"""
from dataclasses import dataclass
import os

import yaml

from .errors import ConfigError

OUTPUT_ENV = "COMSTAB_OUTPUT_DIR"


@dataclass(frozen=True)
class Key:
    default: object
    tag: str
    help: str


SCHEMA = {
    "seed": Key(0, "chosen", "seed for every random stream"),
    "output_dir": Key("comstab-out", "chosen", f"artifact directory (env {OUTPUT_ENV} overrides)"),
    "steering": {
        "controllers": Key(["pid", "fuzzy-pid"], "given", "variants to run: none, pid, fuzzy-pid"),
        "duration": Key(5.0, "chosen", "simulated seconds"),
        "control_rate": Key(1000.0, "chosen", "Hz"),
        "K_desired": Key(0.0024, "given", "target stability factor, s^2/m^2"),
        "error_gain": Key(110.0, "chosen", "Ge, K deviation -> PID error input"),
        "rate_gain": Key(175.0, "chosen", "Gec, dK/dt -> PID rate input"),
        "output_gain": Key(60.0, "chosen", "Gu, PID output -> volts"),
        "fuzzy_error_gain": Key(None, "chosen", "e -> inference universe [-0.1, 0.1] (null: Ge)"),
        "fuzzy_rate_gain": Key(7.0, "chosen", "ec -> inference universe [-0.05, 0.05]"),
        "kp0": Key(15.0, "given", "base proportional gain"),
        "ki0": Key(0.8, "given", "base integral gain"),
        "kd0": Key(9.0, "given", "base derivative gain"),
        "voltage_limit": Key(24.0, "chosen", "motor voltage clamp, V"),
        "slider_disturbance": Key(0.0, "chosen", "constant slider acceleration offset, m/s^2"),
    },
    "walking": {
        "controllers": Key(["pid", "vufc-adrc", "vufc-adrc+grading"], "given", "variants to run"),
        "duration": Key(6.0, "given", "simulated seconds"),
        "control_rate": Key(1000.0, "chosen", "Hz (also the gait sample rate)"),
        "rate_window": Key(0.1, "chosen", "ZMPec = change of ZMPe over this window, s"),
        "observer_x": Key([1000.0, 200.0], "given", "X axis (wo, wc)"),
        "observer_y": Key([1200.0, 250.0], "given", "Y axis (wo, wc)"),
        "spans_x": Key([0.12, 0.06], "chosen", "X base universes (E0, EC0)"),
        "spans_y": Key([0.06, 0.05], "chosen", "Y base universes (E0, EC0)"),
        "ungraded_level": Key(3, "chosen", "level held by the ungraded variant"),
        "pid_gains": Key([15.0, 0.8, 9.0, 40.0], "chosen", "PID baseline kp, ki, kd, output gain"),
        "switch_window": Key(0.15, "chosen", "window after a support switch for the overshoot, s"),
        "model_file": Key(None, "chosen", "grader model file (null: built-in reference centres)"),
        "disturbances": Key(
            [{"kind": "step", "target": "slider_x", "t0": 2.0, "value": 0.5},
             {"kind": "step", "target": "slider_y", "t0": 2.0, "value": 0.3}],
            "chosen", "list of {kind, target, t0, value, width, bandwidth}; "
                      "targets slider_x/slider_y (m/s^2 on the slider), torso_x/torso_y (m/s^2)"),
    },
    "gait": {
        "com_height": Key(0.9, "given", "m"),
        "stride_length": Key(0.4, "given", "m"),
        "step_height": Key(0.1, "given", "m"),
        "single_support": Key(0.5, "given", "s"),
        "double_support": Key(0.1, "given", "s"),
        "stance_width": Key(0.3, "chosen", "m"),
        "foot_length": Key(0.2, "chosen", "m"),
        "foot_width": Key(0.1, "chosen", "m"),
    },
    "vehicle": {
        "total_mass": Key(450.0, "given", "kg"),
        "yaw_inertia": Key(270.0, "chosen", "kg m^2"),
        "wheelbase": Key(1.6, "chosen", "m"),
        "slider_mass": Key(60.0, "chosen", "kg"),
        "K_nominal": Key(0.00097, "given", "stability factor with the slider centred"),
        "reference_excursion": Key(-0.289, "given", "slider travel that reaches K_desired, m"),
        "stiffness_ratio": Key(1.0, "chosen", "rear/front cornering stiffness"),
    },
    "plant": {
        "viscous_damping": Key(0.01, "chosen", "Bz, N m s/rad"),
        "screw_lead": Key(0.01, "chosen", "m/rev"),
        "travel_x": Key(0.35, "chosen", "X slider half travel, m"),
        "travel_y": Key(0.25, "chosen", "Y slider half travel, m"),
    },
    "grader": {
        "samples": Key(10000, "chosen", "training samples per axis"),
        "noise_levels": Key([0.0, 0.1, 0.2, 0.3, 0.4], "chosen", "torso noise std per run, m/s^2"),
        "decimate": Key(10, "chosen", "keep every n-th tick"),
        "n_init": Key(10, "chosen", "k-means restarts"),
        "max_iter": Key(1000, "chosen", "Lloyd iterations per restart"),
        "model_out": Key("grader_model.txt", "chosen", "model file name inside output_dir"),
    },
}


class RunConfig:
    """Validated configuration tree; ``cfg.section.key`` or ``cfg['section']['key']``."""

    def __init__(self, data):
        self._data = data

    def __getitem__(self, key):
        return self._data[key]

    def __getattr__(self, name):
        try:
            value = self._data[name]
        except KeyError:
            raise AttributeError(name) from None
        return _Section(value) if isinstance(value, dict) else value

    def to_dict(self):
        return _copy(self._data)

    @property
    def output_dir(self):
        return os.environ.get(OUTPUT_ENV) or self._data["output_dir"]


class _Section(dict):
    __getattr__ = dict.__getitem__


def _copy(tree):
    if isinstance(tree, dict):
        return {k: _copy(v) for k, v in tree.items()}
    if isinstance(tree, list):
        return [_copy(v) for v in tree]
    return tree


def defaults(schema=SCHEMA):
    return {k: defaults(v) if isinstance(v, dict) else _copy(v.default) for k, v in schema.items()}


def _key_lines(node, prefix=()):
    """Map of key path -> 1-based line for every mapping key in a composed YAML node."""
    lines = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = prefix + (str(key_node.value),)
            lines[path] = key_node.start_mark.line + 1
            lines.update(_key_lines(value_node, path))
    return lines


def _check_type(value, default, path, line):
    name = ".".join(path)
    if default is None or value is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be true or false", line)
        return value
    if isinstance(default, (int, float)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}", line)
        return type(default)(value) if isinstance(default, float) else value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{name} must be a list", line)
        return value
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"{name} must be a string", line)
    return value


def _merge(schema, data, lines, prefix=()):
    out = {}
    if not isinstance(data, dict):
        raise ConfigError(f"section {'.'.join(prefix) or '<root>'} must be a mapping", lines.get(prefix))
    for key in data:
        if key not in schema:
            path = prefix + (str(key),)
            raise ConfigError(f"unknown key {'.'.join(path)!r}", lines.get(path))
    for key, spec in schema.items():
        path = prefix + (key,)
        if isinstance(spec, dict):
            out[key] = _merge(spec, data.get(key, {}) or {}, lines, path)
        elif key in data:
            out[key] = _check_type(data[key], spec.default, path, lines.get(path))
        else:
            out[key] = _copy(spec.default)
    return out


def loads(text):
    """Parse YAML text into a RunConfig (empty text -> all defaults)."""
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else {}
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ConfigError(exc.problem or str(exc), mark.line + 1 if mark else None) from None
    lines = _key_lines(node) if node is not None else {}
    return RunConfig(_merge(SCHEMA, data or {}, lines))


def load(path):
    if path is None:
        return RunConfig(defaults())
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def dumps_defaults(schema=SCHEMA, indent=0):
    """Commented YAML listing every key with its default and provenance tag."""
    out = []
    pad = "  " * indent
    for key, spec in schema.items():
        if isinstance(spec, dict):
            out.append(f"{pad}{key}:")
            out.append(dumps_defaults(spec, indent + 1))
            continue
        value = yaml.safe_dump(spec.default, default_flow_style=True).strip()
        value = value.removesuffix("...").strip()
        out.append(f"{pad}{key}: {value}  # [{spec.tag}] {spec.help}")
    return "\n".join(out)


def describe(schema=SCHEMA, prefix=""):
    """Flat 'key = default [tag] help' lines for --help output."""
    rows = []
    for key, spec in schema.items():
        name = f"{prefix}{key}"
        if isinstance(spec, dict):
            rows.extend(describe(spec, name + "."))
        else:
            rows.append(f"  {name} = {spec.default!r} [{spec.tag}] {spec.help}")
    return rows
