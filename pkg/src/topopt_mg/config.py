"""Run configuration: a flat ``key = value`` file format with flag overrides.

Example file::

    # 64x64 wall, multigrid with three coarsenings
    mesh = 64x64
    levels = accurate, 3
    mg_levels = 3
    filter_radius = 8

Every key of :class:`RunConfig` may appear once; ``#`` starts a comment.
"""

import dataclasses
import os
from dataclasses import dataclass

from .errors import ConfigurationError
from .materials import WALL_MODULI, WALL_VOLUME_FRACTIONS, MaterialModel
from .mto import OptimConfig
from .solvers import METHODS, SolverConfig

__all__ = ["RunConfig", "ConfigParseError", "parse_config", "write_config", "format_config",
           "COMMANDS", "DEFAULT_OUT_DIR"]

COMMANDS = ("poisson-bench", "wall", "solve")
PROBLEMS = ("poisson", "wall")
DEFAULT_OUT_DIR = "topopt_out"


class ConfigParseError(ConfigurationError):
    """Bad configuration entry; carries the key and, for file entries, the line number."""

    def __init__(self, message, key=None, line=None, source=None):
        where = ""
        if line is not None:
            where = f"{source or '<config>'}:{line}: "
        elif source is not None:
            where = f"{source}: "
        super().__init__(f"{where}{message}")
        self.key = key
        self.line = line


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _mesh(text):
    nx, sep, ny = text.strip().lower().partition("x")
    if not sep:
        raise ValueError(f"expected NXxNY, got {text!r}")
    return int(nx), int(ny)


def _meshes(text):
    return tuple(_mesh(x) for x in text.split(",") if x.strip())


def _levels(text):
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            out.append("accurate" if item.lower() == "accurate" else int(item))
    return tuple(out)


def _method(text):
    return text.strip().replace("-", "_")


def _str(text):
    return text.strip()


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{nx}x{ny}" for nx, ny in value)
        return ", ".join(_fmt(v) for v in value)
    return str(value)


# key -> parser; field order of RunConfig is the file order used by write_config
PARSERS = {
    "command": _str,
    "mesh": _meshes,
    "grids": _ints,
    "levels": _levels,
    "problem": _str,
    "method": _method,
    "cgtol": float,
    "cg_max": int,
    "omega": float,
    "gamma": int,
    "pre_sweeps": int,
    "post_sweeps": int,
    "mg_levels": int,
    "bench_max_iter": int,
    "cholesky_cap": int,
    "source": float,
    "moduli": _floats,
    "volume_fractions": _floats,
    "poisson_ratio": float,
    "penalty": float,
    "filter_radius": float,
    "filter_tol": float,
    "tol": float,
    "inner_sweeps": int,
    "move": float,
    "eta": float,
    "density_floor": float,
    "max_outer": int,
    "warm_start": _bool,
    "out_dir": _str,
    "images": _bool,
    "csv": _bool,
    "workers": int,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs; defaults are the square-wall study settings."""

    command: str = "wall"
    mesh: tuple = ((32, 32),)
    grids: tuple = (16, 32, 64, 128, 256)
    levels: tuple = ("accurate", 2)
    problem: str = "poisson"
    method: str = "pcgmg"
    cgtol: float = 1e-6
    cg_max: int = 1000
    omega: float = 0.6
    gamma: int = 1
    pre_sweeps: int = 2
    post_sweeps: int = 2
    mg_levels: int = 2
    bench_max_iter: int = 1_000_000
    cholesky_cap: int = 128
    source: float = 1.0
    moduli: tuple = WALL_MODULI
    volume_fractions: tuple = WALL_VOLUME_FRACTIONS
    poisson_ratio: float = 0.3
    penalty: float = 3.0
    filter_radius: float = 8.0
    filter_tol: float = 0.05
    tol: float = 1e-3
    inner_sweeps: int = 1
    move: float = 0.2
    eta: float = 0.5
    density_floor: float = 1e-3
    max_outer: int = 2000
    warm_start: bool = False
    out_dir: str = DEFAULT_OUT_DIR
    images: bool = True
    csv: bool = True
    workers: int = 1

    def solver_config(self, method=None, num_coarsenings=None):
        return SolverConfig(method or self.method, tol=self.cgtol, max_iter=self.cg_max,
                            omega=self.omega, gamma=self.gamma, pre_sweeps=self.pre_sweeps,
                            post_sweeps=self.post_sweeps,
                            num_coarsenings=self.mg_levels if num_coarsenings is None
                            else num_coarsenings)

    def material(self):
        return MaterialModel(self.moduli, self.poisson_ratio, self.penalty)

    def optim_config(self):
        return OptimConfig(volume_fractions=self.volume_fractions,
                           filter_radius=self.filter_radius, filter_tol=self.filter_tol,
                           tol=self.tol, inner_sweeps=self.inner_sweeps, move=self.move,
                           eta=self.eta, density_floor=self.density_floor,
                           max_outer=self.max_outer, warm_start=self.warm_start,
                           solver=self.solver_config())

    def validate(self):
        """Raise ConfigParseError naming the first offending key."""
        def check(ok, key, message):
            if not ok:
                raise ConfigParseError(f"{key}: {message}", key=key)

        check(self.command in COMMANDS, "command", f"must be one of {COMMANDS}")
        check(self.problem in PROBLEMS, "problem", f"must be one of {PROBLEMS}")
        check(self.method in METHODS, "method", f"must be one of {METHODS}")
        check(len(self.mesh) >= 1 and all(nx >= 1 and ny >= 1 for nx, ny in self.mesh),
              "mesh", "need at least one mesh with positive dimensions")
        check(len(self.grids) >= 1, "grids", "need at least one grid")
        check(len(self.levels) >= 1 and all(lv == "accurate" or lv >= 0 for lv in self.levels),
              "levels", "entries are 'accurate' or coarsening counts >= 0")
        check(self.bench_max_iter >= 1, "bench_max_iter", "must be >= 1")
        check(self.cholesky_cap >= 0, "cholesky_cap", "must be >= 0")
        check(self.workers >= 1, "workers", "must be >= 1")
        total = sum(self.volume_fractions)
        check(abs(total - 1.0) <= 1e-12, "volume_fractions", f"must sum to 1, got {total:.12g}")
        check(len(self.volume_fractions) == len(self.moduli), "volume_fractions",
              f"{len(self.volume_fractions)} entries for {len(self.moduli)} moduli")
        # delegate the numeric invariants, mapping each failure back to its key
        groups = (
            (("cgtol", "cg_max", "omega", "gamma", "pre_sweeps", "post_sweeps", "mg_levels",
              "method"), self.solver_config),
            (("moduli", "poisson_ratio", "penalty"), self.material),
            (("volume_fractions", "filter_radius", "filter_tol", "tol", "inner_sweeps",
              "move", "eta", "density_floor", "max_outer"), self.optim_config),
        )
        for keys, build in groups:
            try:
                build()
            except ConfigurationError as exc:
                key = _guess_key(str(exc), keys)
                raise ConfigParseError(f"{key}: {exc}", key=key) from None
        return self


def _guess_key(message, keys):
    aliases = {"tol": ("tolerance",), "cgtol": ("tol",), "cg_max": ("max_iter",),
               "mg_levels": ("num_coarsenings",), "penalty": ("p_exp", "penal"),
               "moduli": ("moduli", "phase"), "pre_sweeps": ("sweeps",)}
    low = message.lower()
    for key in keys:
        if key in low:
            return key
    for key in keys:
        if any(alias in low for alias in aliases.get(key, ())):
            return key
    return keys[0]


def _read_file(path):
    entries = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}",
                                   line=lineno, source=path)
        if key not in PARSERS:
            raise ConfigParseError(f"unknown key {key!r}", key=key, line=lineno, source=path)
        if key in entries:
            raise ConfigParseError(f"duplicate key {key!r}", key=key, line=lineno, source=path)
        entries[key] = (value, lineno)
    return entries


def parse_config(path=None, overrides=None, env=None):
    """Build a validated RunConfig from an optional file plus flag overrides.

    Parameters
    ----------
    path : str, optional
        Flat ``key = value`` file.
    overrides : dict, optional
        ``key -> value`` from command-line flags; values may be strings
        (parsed like file values) or already-typed. Overrides win over the file.
    env : mapping, optional
        Environment for ``TOPOPT_OUT``, the default output directory
        (``os.environ`` when omitted).

    Raises
    ------
    ConfigParseError
        Unknown key, unparsable value or violated invariant; the message
        names the key and, for file entries, the line number.
    """
    env = os.environ if env is None else env
    entries = _read_file(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if key not in PARSERS:
            raise ConfigParseError(f"unknown key {key!r}", key=key, source="flags")
        entries[key] = (value, None)

    values = {}
    if env.get("TOPOPT_OUT"):
        values["out_dir"] = env["TOPOPT_OUT"]
    for key, (value, lineno) in entries.items():
        if isinstance(value, str):
            try:
                value = PARSERS[key](value)
            except ValueError as exc:
                raise ConfigParseError(f"{key}: cannot parse {value.strip()!r} ({exc})", key=key,
                                       line=lineno, source=path if lineno else "flags") from None
        values[key] = value
    cfg = RunConfig(**values)
    try:
        return cfg.validate()
    except ConfigParseError as exc:
        lineno = entries.get(exc.key, (None, None))[1]
        if lineno is None:
            raise
        raise ConfigParseError(str(exc), key=exc.key, line=lineno, source=path) from None


def format_config(cfg):
    lines = [f"{f.name} = {_fmt(getattr(cfg, f.name))}" for f in dataclasses.fields(cfg)]
    return "\n".join(lines) + "\n"


def write_config(cfg, path):
    """Write every field so that ``parse_config(path)`` returns an equal RunConfig."""
    with open(path, "w") as fh:
        fh.write(format_config(cfg))
    return path
