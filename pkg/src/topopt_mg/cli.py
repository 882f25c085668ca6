"""``topopt-mg`` command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

import argparse
import os
import sys

from . import bench
from .config import COMMANDS, PARSERS, parse_config, write_config
from .errors import ConfigurationError, NumericalError
from .fem import assemble_elasticity, assemble_poisson
from .grid import GridLevel, build_hierarchy
from .materials import DensityField
from .mto import square_wall
from .report import bench_table_markdown, emit_outputs
from .solvers import solve

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; usage errors are configuration errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="FILE", help="flat key = value configuration file")
    for key in PARSERS:
        if key == "command":
            continue
        parser.add_argument("--" + key.replace("_", "-"), dest=key, metavar="VALUE",
                            default=None, help=argparse.SUPPRESS)


def build_parser():
    parser = _Parser(prog="topopt-mg", description=(
        "Multigrid-accelerated multi-material topology optimization. "
        "Every configuration key is also accepted as a flag, e.g. --mg-levels 3."))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "poisson-bench": "compare linear solvers on the Poisson problem (--tol sets cgtol)",
        "wall": "run the square-wall optimization over meshes and solver levels",
        "solve": "solve one linear system and report iterations (--tol sets cgtol)",
    }
    for name in COMMANDS:
        _add_config_flags(sub.add_parser(name, help=helps[name], description=helps[name]))
    return parser


def _overrides(args):
    out = {key: getattr(args, key) for key in PARSERS
           if key != "command" and getattr(args, key, None) is not None}
    # for single linear solves the tolerance flag means the solver tolerance
    if args.command in ("poisson-bench", "solve") and "tol" in out:
        out["cgtol"] = out.pop("tol")
    out["command"] = args.command
    return out


def _run_poisson_bench(cfg):
    stationary = max(cfg.bench_max_iter, 1)
    matrix = bench.run_poisson_bench(cfg.grids, tol=cfg.cgtol, max_iter=stationary,
                                     cholesky_cap=cfg.cholesky_cap, source=cfg.source,
                                     solver_kwargs={"omega": cfg.omega, "gamma": cfg.gamma,
                                                    "pre_sweeps": cfg.pre_sweeps,
                                                    "post_sweeps": cfg.post_sweeps})
    emit_outputs(matrix, cfg.out_dir, cfg.images, cfg.csv)
    print(bench_table_markdown(matrix), end="")
    return matrix


def _run_wall(cfg):
    optim = cfg.optim_config()
    matrix = bench.run_wall_sweep(cfg.mesh, cfg.levels, optim, cfg.out_dir,
                                  cfg.images, cfg.csv, cfg.workers)
    emit_outputs(matrix, cfg.out_dir, cfg.images, cfg.csv)
    print(bench_table_markdown(matrix), end="")
    return matrix


def _run_solve(cfg):
    if len(cfg.mesh) != 1:
        raise ConfigurationError("solve takes exactly one mesh")
    nx, ny = cfg.mesh[0]
    dofs = 1 if cfg.problem == "poisson" else 2
    solver = cfg.solver_config()
    hier = None
    if solver.method == "pcgmg":
        hier = build_hierarchy(nx, ny, solver.num_coarsenings, dofs)
        level = hier.finest
    else:
        level = GridLevel(nx, ny, dofs)
    if cfg.problem == "poisson":
        K, F = assemble_poisson(level, cfg.source)
    else:
        wall = square_wall(nx, ny, cfg.material())
        density = DensityField.uniform(cfg.volume_fractions, nx, ny)
        K, F = assemble_elasticity(level, density, wall.mat, wall.bc)
    rep = solve(K, F, solver, hier)
    print(f"problem={cfg.problem} mesh={nx}x{ny} method={solver.method} "
          f"iterations={rep.iterations} residual={rep.residual:.3e} "
          f"converged={rep.converged} seconds={rep.wall_time:.3f}")
    if cfg.csv:
        os.makedirs(cfg.out_dir, exist_ok=True)
        path = os.path.join(cfg.out_dir, "residuals.csv")
        with open(path, "w") as fh:
            fh.write("iteration,relative_residual\n")
            for i, r in enumerate(rep.history):
                fh.write(f"{i},{r!r}\n")
    return rep


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides(args))
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_config(cfg, os.path.join(cfg.out_dir, "config.txt"))
        if cfg.command == "poisson-bench":
            result = _run_poisson_bench(cfg)
        elif cfg.command == "wall":
            result = _run_wall(cfg)
        else:
            result = _run_solve(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        name = f" {exc.filename}" if getattr(exc, "filename", None) else ""
        print(f"I/O error:{name} {exc}", file=sys.stderr)
        return EXIT_IO
    if hasattr(result, "rows") and any(row.error for row in result.rows):
        for row in result.rows:
            if row.error:
                print(f"{row.mesh} {row.label}: {row.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
