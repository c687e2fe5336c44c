"""Command-line entry point: ``comstab {steer,walk,train-grader,gains,export}``.

Exit codes: 0 ok, 1 usage or configuration error, 2 a physical limit was
hit (slider on its stop, ZMP outside the support polygon, unreachable
pose or an unstable discretization).
"""
import argparse
import csv
import logging
import math
import os
import sys

import numpy as np

from . import adrc, config, fuzzy, grader, harness, mechanism, supervisor, vehicle
from .errors import (BallisticPhaseError, ComstabError, ConfigError, InfeasibleBoundaryError,
                     ParameterError, StabilityMarginError, UnreachableTargetError)
from .gait import GaitParams
from .mechanism import x_axis_params, y_axis_params

EXIT_OK, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2
PHYSICAL_ERRORS = (BallisticPhaseError, InfeasibleBoundaryError, StabilityMarginError,
                   UnreachableTargetError)

log = logging.getLogger("comstab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- building blocks from a RunConfig ---------------------------------------

def vehicle_from(cfg):
    v = cfg.vehicle
    L = v.wheelbase
    base = vehicle.VehicleParams(total_mass=v.total_mass, yaw_inertia=v.yaw_inertia, wheelbase=L,
                                 front_dist=L / 2.0, rear_dist=L / 2.0, slider_mass=v.slider_mass)
    return vehicle.calibrate(v.K_nominal, cfg.steering.K_desired, v.reference_excursion,
                             v.stiffness_ratio, base)


def plants_from(cfg):
    p = cfg.plant
    common = dict(viscous_damping=p.viscous_damping, screw_lead=p.screw_lead,
                  slider_mass=cfg.vehicle.slider_mass)
    return (x_axis_params(travel_limits=(-p.travel_x, p.travel_x), **common),
            y_axis_params(travel_limits=(-p.travel_y, p.travel_y), **common))


def gait_from(cfg, control_rate):
    return GaitParams(sample_dt=1.0 / control_rate, **cfg.gait)


def steering_scenario(cfg, controller, duration=None):
    s = dict(cfg.steering)
    s.pop("controllers")
    if duration is not None:
        s["duration"] = duration
    return harness.SteeringScenario(controller=controller, seed=cfg.seed, **s)


def walking_scenario(cfg, duration=None):
    w = cfg.walking
    terms = []
    for i, d in enumerate(w.disturbances):
        if not isinstance(d, dict):
            raise ConfigError(f"walking.disturbances[{i}] must be a mapping")
        try:
            terms.append(harness.DisturbanceTerm(**d))
        except TypeError as exc:
            raise ConfigError(f"walking.disturbances[{i}]: {exc}") from None
    return harness.WalkingScenario(
        duration=w.duration if duration is None else duration, control_rate=w.control_rate,
        disturbances=tuple(terms), seed=cfg.seed, rate_window=w.rate_window,
        observer=(tuple(w.observer_x), tuple(w.observer_y)),
        spans=(tuple(w.spans_x), tuple(w.spans_y)), ungraded_level=w.ungraded_level,
        pid_gains=tuple(w.pid_gains), switch_window=w.switch_window,
        gait=gait_from(cfg, w.control_rate))


def grader_model(path):
    return grader.load_model(path) if path else grader.table1_model()


# -- output helpers -----------------------------------------------------------

def _out_dir(cfg, override=None):
    path = override or cfg.output_dir
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return v


def format_table(header, rows):
    cells = [[str(h) for h in header]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths)))
             for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.4g}"
    return str(v)


# -- commands -------------------------------------------------------------------

def cmd_steer(cfg, args):
    out = _out_dir(cfg, args.output_dir)
    vp = vehicle_from(cfg)
    plant = plants_from(cfg)[0]
    controllers = args.controller or cfg.steering.controllers
    rows = []
    limited = False
    for name in controllers:
        res = harness.run_steering(steering_scenario(cfg, name, args.duration), vp, plant)
        write_csv(os.path.join(out, f"steer_{name}.csv"), harness.STEERING_COLUMNS, res.rows())
        m = res.metrics
        rows.append((name.upper() if name != "fuzzy-pid" else "Fuzzy-PID", m.steady_state_error,
                     m.overshoot, m.rise_time, m.settling_time, float(res.K[-1]), float(res.y[-1])))
        limited |= res.saturated
    print(format_table(("controller", "sse_%", "overshoot_%", "rise_s", "settling_s", "K_final",
                        "slider_final_m"), rows))
    target = vehicle.slider_for_stability_factor(cfg.steering.K_desired, vp)
    print(f"slider position for K_d: {target:.4f} m")
    if limited:
        print("slider reached a travel stop", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_OK


def cmd_walk(cfg, args):
    out = _out_dir(cfg, args.output_dir)
    scenario = walking_scenario(cfg, args.duration)
    model = grader_model(args.model or cfg.walking.model_file)
    variants = tuple(args.controller or cfg.walking.controllers)
    comp = harness.compare_walking(scenario, model, plants_from(cfg), variants)
    rows = []
    tipped = False
    for name, res in comp.results.items():
        write_csv(os.path.join(out, f"walk_{name}.csv"), harness.WALKING_COLUMNS, res.rows())
        for m in res.metrics:
            rows.append((name,) + m.row())
        tipped |= res.tipped
    print(format_table(("controller",) + harness.WALKING_METRIC_COLUMNS, rows))
    for a, axis in enumerate(grader.AXES):
        so, ss = comp.switch_overshoot_reduction[a], comp.steady_state_reduction[a]
        if not math.isnan(so):
            print(f"{axis}: grading reduces switch overshoot by {so:.2f}% and steady error by {ss:.2f}%")
    if tipped:
        print("ZMP left the support polygon (tip-over)", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_OK


def cmd_train_grader(cfg, args):
    out = _out_dir(cfg, args.output_dir)
    g = cfg.grader
    n = args.samples if args.samples is not None else g.samples
    if n < grader.N_LEVELS:
        raise ParameterError(f"need at least {grader.N_LEVELS} samples")
    seed = cfg.seed
    scenario = walking_scenario(cfg)

    def simulate(noise, run_seed):
        return harness.walking_error_samples(noise, run_seed, scenario.duration)

    data = grader.generate_dataset(simulate, g.noise_levels, max(n, 50), seed, g.decimate)
    data = {axis: arr[:n] for axis, arr in data.items()}
    model = grader.train_model(data, seed=seed, n_init=g.n_init, max_iter=g.max_iter)
    path = args.out or os.path.join(out, g.model_out)
    grader.save_model(model, path)
    write_csv(os.path.join(out, "grader_dataset.csv"), ("sample", "axis", "zmpe", "zmpec"),
              ((i, axis, e, ec) for axis, arr in data.items() for i, (e, ec) in enumerate(arr)))
    ref = grader.table1_model()
    for axis in grader.AXES:
        rows = [(f"L{i + 1}", *model.axis(axis)[i], *ref.axis(axis)[i]) for i in range(grader.N_LEVELS)]
        print(f"[{axis}]")
        print(format_table(("level", "zmpe", "zmpec", "ref_zmpe", "ref_zmpec"), rows))
    print(f"model written to {path}")
    return EXIT_OK


def cmd_gains(cfg, args):
    p1, p2, p3 = adrc.eso_gains(args.wo)
    kp, kd = adrc.sef_gains(args.wc)
    print(" ".join(f"{k}={v:.10g}" for k, v in
                   (("phi1", p1), ("phi2", p2), ("phi3", p3), ("kp", kp), ("kd", kd))))
    dt = 1.0 / args.rate
    l1, l2, l3 = adrc.discrete_eso_gains(args.wo, dt)
    rho = adrc.closed_loop_radius(args.wo, args.wc, mechanism.B0_DEFAULT, dt)
    print(f"at {args.rate:g} Hz: l1={l1:.6g} l2={l2:.6g} l3={l3:.6g} loop_radius={rho:.4f}"
          + ("" if rho < 1 else "  (unstable)"))
    return EXIT_OK


# scripted park -> drive -> corner -> drive -> park -> walk -> park, (seconds, signal bits)
DEMO_DRIVE = ((0.2, (0, 0, 0, 0)), (0.5, (0, 1, 0, 0)), (0.8, (1, 1, 0, 1)), (0.5, (0, 1, 0, 0)),
              (0.3, (0, 0, 0, 0)), (1.0, (0, 0, 1, 1)), (0.3, (0, 0, 0, 0)))


def supervisor_trace(script=DEMO_DRIVE, dt=0.001):
    signals = []
    for duration, bits in script:
        signals.extend([bits] * int(round(duration / dt)))
    modes = supervisor.run_trace(signals, dt)
    return [(i * dt, m.name, *bits) for i, (m, bits) in enumerate(zip(modes, signals))]


def cmd_export(cfg, args):
    out = _out_dir(cfg, args.output_dir)
    with open(os.path.join(out, "config_defaults.yaml"), "w", encoding="utf-8") as fh:
        fh.write(config.dumps_defaults() + "\n")
    tables = {"rules_dkp.txt": fuzzy.TABLE_DKP, "rules_dki.txt": fuzzy.TABLE_DKI,
              "rules_dkd.txt": fuzzy.TABLE_DKD, "rules_yd.txt": fuzzy.TABLE_YD,
              "rules_scale.txt": fuzzy.TABLE_SCALE}
    for name, table in tables.items():
        with open(os.path.join(out, name), "w", encoding="utf-8") as fh:
            fh.write(table.to_text())
    grader.save_model(grader.table1_model(), os.path.join(out, "grader_reference.txt"))
    vp = vehicle_from(cfg)
    rows = []
    for slider_y in (0.0, cfg.vehicle.reference_excursion):
        pts = vehicle.constant_radius_test(vp, slider_y)
        for (delta, ux, wr), (ay, diff, K_est) in zip(pts, vehicle.steady_test_reduce(pts, 15.0, vp.wheelbase)):
            rows.append((slider_y, ay, diff, K_est, ux, wr / delta))
    write_csv(os.path.join(out, "steady_test.csv"),
              ("slider_y", "ay", "alpha_diff", "K_est", "ux", "gain"), rows)
    write_csv(os.path.join(out, "supervisor_trace.csv"),
              ("t", "mode", "ST_delta", "ST_ux", "ST_theta", "ST_ydot"), supervisor_trace())
    print(f"exported tables, reference model, steady-test and mode trace to {out}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser():
    epilog = "configuration keys (YAML, nested by section):\n" + "\n".join(config.describe())
    parser = _Parser(prog="comstab", description="COM-slider stability control toolkit",
                     epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--output-dir", help="artifact directory")
        p.set_defaults(func=func)
        return p

    p = add("steer", cmd_steer, "steering-stability regulation of K")
    p.add_argument("--controller", action="append", choices=harness.STEERING_VARIANTS)
    p.add_argument("--duration", type=float)
    p = add("walk", cmd_walk, "walking ZMP control comparison")
    p.add_argument("--controller", action="append", choices=harness.WALKING_VARIANTS)
    p.add_argument("--duration", type=float)
    p.add_argument("--model", help="grader model file")
    p = add("train-grader", cmd_train_grader, "train the stability grader from simulated walks")
    p.add_argument("--samples", type=int)
    p.add_argument("--out", help="model file path")
    p = add("gains", cmd_gains, "ESO and feedback gains for given bandwidths")
    p.add_argument("wo", type=float, help="observer bandwidth")
    p.add_argument("wc", type=float, help="controller bandwidth")
    p.add_argument("--rate", type=float, default=1000.0, help="sample rate for the discrete gains, Hz")
    add("export", cmd_export, "write rule tables, reference model, steady-test CSV and a mode trace")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config.load(args.config)
        if args.seed is not None:
            data = cfg.to_dict()
            data["seed"] = args.seed
            cfg = config.RunConfig(data)
        return args.func(cfg, args)
    except (ConfigError, ParameterError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PHYSICAL_ERRORS as exc:
        print(f"physical limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ComstabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
