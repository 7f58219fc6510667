"""Command-line driver.

Subcommands::

    ccaphoton sweep      --var delta|kx|coskx|xdist ...
    ccaphoton selfenergy --var kx|coskx|ky ...
    ccaphoton dos        --var energy ...
    ccaphoton oracle     --var delta|kx|coskx [--packet] ...

A ``--config`` file (JSON, same layout as ``meta.spec`` in JSON output)
provides the base spec; flags override it. Exit codes: 0 success, 2 invalid
spec, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

from .errors import InvalidSpecError, NumericalError
from .lattice import LayerSpec, ModelParams
from .sweeps import VARIABLES, SweepSpec, parse_angle, params_from_dict, run_sweep, write_output

__all__ = ["main", "build_parser", "spec_from_args"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

_SWEEP_BY_VAR = {"delta": "delta-sweep", "kx": "kx-sweep", "coskx": "kx-sweep", "xdist": "xdist-sweep"}
_FIXED_MODE = {"selfenergy": "selfenergy", "dos": "dos", "oracle": "oracle-compare"}

_DEFAULT_RANGE = {
    "delta": (-40.0, 40.0, 801),
    "kx": (0.05, math.pi - 0.05, 301),
    "coskx": (-0.99, 0.99, 397),
    "ky": (-math.pi + 0.05, math.pi - 0.05, 301),
    "xdist": (1, 20, 20),
    "energy": (-4.5, 4.5, 901),
}
_DEFAULT_VAR = {"sweep": "delta", "selfenergy": "coskx", "dos": "energy", "oracle": "delta"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON spec; flags override its values")
    common.add_argument("--out", help="output file; '-' for stdout (the default)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    common.add_argument("--mode", choices=("paper", "directional", "literal"),
                        help="R_II counting for two layers")
    common.add_argument("--d", type=int, help="atomic period along y")
    common.add_argument("--xi", type=float, help="hopping strength")
    common.add_argument("--omega", help="coupling of layer 1")
    common.add_argument("--omega2", help="coupling of layer 2 (enables two layers)")
    common.add_argument("--x1", type=int, help="column of layer 1")
    common.add_argument("--x2", type=int, help="column of layer 2")
    common.add_argument("--kx", help="incident kx, e.g. pi/8")
    common.add_argument("--ky", help="incident ky, e.g. pi/4")
    common.add_argument("--delta", type=float, help="detuning omega_c - omega_a")
    common.add_argument("--var", help="swept variable")
    common.add_argument("--start", help="first grid value")
    common.add_argument("--stop", help="last grid value")
    common.add_argument("--count", type=int, help="number of grid points (>= 2)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ccaphoton", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("sweep", parents=[common], help="R_I / R_II against delta, kx or layer distance")
    sub.add_parser("selfenergy", parents=[common], help="per-channel self-energies")
    sub.add_parser("dos", parents=[common], help="1D densities of states of the channels")
    oracle = sub.add_parser("oracle", parents=[common], help="closed forms against the oracles")
    oracle.add_argument("--packet", action="store_true", help="also run the time-domain oracle")
    oracle.add_argument("--lx", type=int, help="lattice length of the time-domain run")
    return parser


def _params(args, base: ModelParams | None) -> ModelParams:
    p = base or ModelParams.one_layer(5.0)
    layers = list(p.layers)
    if args.omega is not None or args.x1 is not None:
        l1 = layers[0]
        layers[0] = LayerSpec(l1.x if args.x1 is None else args.x1,
                              l1.omega if args.omega is None else complex(args.omega))
    if args.omega2 is not None or args.x2 is not None:
        if len(layers) == 1:
            layers.append(LayerSpec(layers[0].x + 1, 0.0))
        l2 = layers[1]
        layers[1] = LayerSpec(l2.x if args.x2 is None else args.x2,
                              l2.omega if args.omega2 is None else complex(args.omega2))
    return ModelParams(xi=p.xi if args.xi is None else args.xi,
                       delta=p.delta if args.delta is None else args.delta,
                       d=p.d if args.d is None else args.d,
                       layers=tuple(layers))


def spec_from_args(args) -> SweepSpec:
    """Merge ``--config`` with command-line flags into a validated spec."""
    base = None
    if args.config:
        base = SweepSpec.from_file(args.config)
    cmd = args.command
    try:
        params = _params(args, base.params if base else None)
    except ValueError as exc:
        raise InvalidSpecError(f"params: {exc}") from None

    var = args.var or (base.var if base else _DEFAULT_VAR[cmd])
    mode = _FIXED_MODE.get(cmd) or _SWEEP_BY_VAR.get(var)
    if mode is None:
        raise InvalidSpecError(f"var: 'sweep' sweeps one of {sorted(_SWEEP_BY_VAR)}, got {var!r}")
    if base is not None and base.mode != mode:
        raise InvalidSpecError(f"mode: config has mode {base.mode!r}, subcommand {cmd!r} needs {mode!r}")
    if var not in VARIABLES[mode]:
        raise InvalidSpecError(f"var: {cmd!r} sweeps one of {VARIABLES[mode]}, got {var!r}")

    if base is not None and base.var == var:
        start, stop, count = base.start, base.stop, base.count
    else:
        start, stop, count = _DEFAULT_RANGE[var]
    start = start if args.start is None else parse_angle(args.start)
    stop = stop if args.stop is None else parse_angle(args.stop)
    count = count if args.count is None else args.count

    fields = dict(mode=mode, params=params, var=var, start=float(start), stop=float(stop),
                  count=count)
    if args.kx is not None:
        fields["kx"] = parse_angle(args.kx)
    if args.ky is not None:
        fields["ky"] = parse_angle(args.ky)
    if args.mode is not None:
        fields["r_mode"] = args.mode
    if args.out is not None:
        fields["out"] = None if args.out == "-" else args.out
    if args.format is not None:
        fields["format"] = args.format
    if getattr(args, "packet", False):
        fields["packet"] = True
    if getattr(args, "lx", None) is not None:
        fields["lx"] = args.lx
    if base is not None:
        return replace(base, **fields)
    return SweepSpec(**fields)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        if args.jobs is not None and args.jobs < 1:
            raise InvalidSpecError(f"jobs: expected a positive integer, got {args.jobs}")
        result = run_sweep(spec, args.jobs)
        text = write_output(result, spec)
    except InvalidSpecError as exc:
        print(f"ccaphoton: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"ccaphoton: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not spec.out:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
