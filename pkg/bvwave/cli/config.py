"""
Run configuration

Config files are flat ``key=value`` text with dotted sections (``grid.nx=129``), read with
python-decouple's RepositoryEnv. Values resolve in the order: per-problem defaults,
file, ``--override`` flags.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

from decouple import Config, Csv, RepositoryEmpty, RepositoryEnv, UndefinedValueError

from bvwave.core import ConfigError, Grid, RegularizationParams, ValidationError
from bvwave.helpers import CustomProblem, ProblemKind


logger = logging.getLogger(__name__)

GRID_KEYS = ("grid.dim", "grid.lo", "grid.hi", "grid.nx", "grid.nt", "grid.T")
PATH_KEYS = ("path.gamma0", "path.nu", "path.tol_gamma", "path.c_kappa", "path.kappa_exp")
SOLVER_KEYS = ("newton.tol", "newton.max_iter", "krylov.tol", "krylov.max_iter", "krylov.restart")
PROBLEM_KEYS = {
    ProblemKind.DIRAC: ("problem.l", "problem.alpha"),
    ProblemKind.CANTOR: ("problem.eps", "problem.plateaus", "problem.g_scale"),
    ProblemKind.CUSTOM: ("problem.custom", "problem.alpha", "problem.m"),
}
OTHER_KEYS = ("problem", "output.dir", "seed")
DERIVED_KEYS = ("problem.beta",)
ALL_PROBLEM_KEYS = frozenset(key for keys in PROBLEM_KEYS.values() for key in keys)

_COMMON_DEFAULTS = {
    "grid.nx": "33",
    "path.gamma0": "1.0",
    "path.kappa_exp": "4",
    "newton.max_iter": "50",
    "krylov.tol": "1e-10",
    "krylov.max_iter": "2000",
    "krylov.restart": "50",
    "seed": "0",
}
DEFAULTS = {
    ProblemKind.DIRAC: {
        "grid.dim": "2", "grid.lo": "-1", "grid.hi": "1", "grid.T": "2",
        "problem.l": "3", "problem.alpha": "1.0",
        "path.nu": "0.1", "path.tol_gamma": "1e-8", "path.c_kappa": "1.0",
        "newton.tol": "1e-6",
    },
    ProblemKind.CANTOR: {
        "grid.dim": "2", "grid.lo": "-2", "grid.hi": "2", "grid.T": "5",
        "problem.eps": "0.28", "problem.plateaus": "0.5:2:1,3:4.5:-1", "problem.g_scale": "10",
        "path.nu": "0.5", "path.tol_gamma": "3.8e-6", "path.c_kappa": "0.0",
        "newton.tol": "0.5e-4",
    },
    ProblemKind.CUSTOM: {
        "grid.dim": "1", "grid.lo": "-1", "grid.hi": "1", "grid.T": "2",
        "problem.custom": "zero", "problem.alpha": "1.0", "problem.m": "1",
        "path.nu": "0.1", "path.tol_gamma": "1e-4", "path.c_kappa": "1.0",
        "newton.tol": "1e-6",
    },
}


class _MappingRepository(RepositoryEmpty):
    """Repository over an in-memory mapping of dotted config keys"""

    def __init__(self, data: Mapping[str, str]) -> None:
        super().__init__()
        self.data = dict(data)

    def __contains__(self, key: str) -> bool:
        return key in self.data

    def __getitem__(self, key: str) -> str:
        return self.data[key]


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a run needs

    :param problem: which problem to build
    :param grid: the grid
    :param params: regularization and solver parameters
    :param options: problem parameters (l, alpha, eps, plateaus, g_scale, custom, m)
    :param output_dir: artifact directory, None to fall back on the environment
    :param seed: seed of randomized checks
    """

    problem: ProblemKind
    grid: Grid
    params: RegularizationParams
    options: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[Path] = None
    seed: int = 0


def _fail(message: str, key: Optional[str] = None) -> None:
    logger.error(message)
    raise ConfigError(message, key=key)


def _read_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as error:
        _fail(f"Cannot read config file {path}: {error}")
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line and not line.startswith("#") and "=" not in line:
            _fail(f"Malformed line {number} in {path}: '{line}' (expected key=value)")
    return dict(RepositoryEnv(str(path)).data)


def _parse_overrides(overrides: Union[Sequence[str], Mapping[str, Any]]) -> Dict[str, str]:
    if isinstance(overrides, Mapping):
        return {str(key): str(value) for key, value in overrides.items()}
    parsed = {}
    for item in overrides:
        if "=" not in item:
            _fail(f"Override '{item}' is not of the form key=value")
        key, value = item.split("=", 1)
        parsed[key.strip()] = value.strip()
    return parsed


def _check_keys(kind: ProblemKind, values: Mapping[str, str]) -> None:
    allowed = set(GRID_KEYS) | set(PATH_KEYS) | set(SOLVER_KEYS) | set(OTHER_KEYS) | set(PROBLEM_KEYS[kind])
    for key in values:
        if key in DERIVED_KEYS:
            _fail(f"{key} is derived from the other parameters and cannot be set", key)
        if key in ALL_PROBLEM_KEYS and key not in allowed:
            _fail(f"{key} does not apply to the {kind.value} problem", key)
        if key not in allowed:
            _fail(f"Unknown config key '{key}'", key)
    selected = values.get("problem")
    if selected is not None and selected.strip().lower() != kind.value:
        _fail(f"Config selects problem '{selected}' but the run is '{kind.value}'", "problem")


def _getter(config: Config) -> Callable[..., Any]:
    def get(key: str, cast: Callable[[str], Any]) -> Any:
        try:
            return config(key, cast=cast)
        except UndefinedValueError:
            _fail(f"{key} required", key)
        except ValueError as error:
            _fail(f"Invalid value for {key}: {error}", key)
    return get


def _per_axis(values: Tuple[Any, ...], dim: int, key: str) -> Tuple[Any, ...]:
    if len(values) == 1:
        return tuple(values) * dim
    if len(values) != dim:
        _fail(f"{key} needs 1 or {dim} entries, got {len(values)}", key)
    return tuple(values)


def _plateaus(text: str) -> Tuple[Tuple[float, float, float], ...]:
    items = []
    for item in Csv(post_process=tuple)(text):
        parts = item.split(":")
        if len(parts) != 3:
            raise ValueError(f"plateau '{item}' is not start:end:sign")
        items.append(tuple(float(part) for part in parts))
    return tuple(items)


def parse_config(
        problem: Union[ProblemKind, str],
        path: Optional[Union[str, Path]] = None,
        overrides: Union[Sequence[str], Mapping[str, Any]] = (),
) -> RunConfig:
    """
    Build a validated :class:`RunConfig`

    :param problem: ``dirac``, ``cantor`` or ``custom``
    :param path: optional config file
    :param overrides: ``key=value`` strings or a mapping applied last
    :raise ConfigError: on malformed input, unknown or inapplicable keys, missing keys and
        invalid values; the message names the offending key
    """
    try:
        kind = ProblemKind(problem) if not isinstance(problem, ProblemKind) else problem
    except ValueError:
        _fail(f"Unknown problem '{problem}'. Expected one of {[kind.value for kind in ProblemKind]}", "problem")

    values: Dict[str, str] = {}
    if path is not None:
        values.update(_read_file(path))
    values.update(_parse_overrides(overrides))
    _check_keys(kind, values)

    get = _getter(Config(_MappingRepository({**_COMMON_DEFAULTS, **DEFAULTS[kind], **values})))

    dim = get("grid.dim", int)
    try:
        grid = Grid(
            dim,
            _per_axis(get("grid.lo", Csv(cast=float, post_process=tuple)), dim, "grid.lo"),
            _per_axis(get("grid.hi", Csv(cast=float, post_process=tuple)), dim, "grid.hi"),
            _per_axis(get("grid.nx", Csv(cast=int, post_process=tuple)), dim, "grid.nx"),
            get("grid.T", float),
            get("grid.nt", int),
        )
        params = RegularizationParams(
            gamma0=get("path.gamma0", float),
            nu=get("path.nu", float),
            tol_gamma=get("path.tol_gamma", float),
            tol_newton=get("newton.tol", float),
            c_kappa=get("path.c_kappa", float),
            kappa_exp=get("path.kappa_exp", float),
            max_newton_iters=get("newton.max_iter", int),
            krylov_tol=get("krylov.tol", float),
            krylov_max_iter=get("krylov.max_iter", int),
            krylov_restart=get("krylov.restart", int),
        )
    except ValidationError as error:
        _fail(f"Invalid grid or path settings: {error.message}")

    if kind is ProblemKind.DIRAC:
        options = {"l": get("problem.l", int), "alpha": get("problem.alpha", float)}
    elif kind is ProblemKind.CANTOR:
        options = {
            "eps": get("problem.eps", float),
            "plateaus": get("problem.plateaus", _plateaus),
            "g_scale": get("problem.g_scale", float),
        }
    else:
        options = {
            "custom": get("problem.custom", CustomProblem),
            "alpha": get("problem.alpha", float),
            "m": get("problem.m", int),
        }

    output_dir = values.get("output.dir")
    config = RunConfig(
        problem=kind,
        grid=grid,
        params=params,
        options=options,
        output_dir=Path(output_dir) if output_dir else None,
        seed=get("seed", int),
    )
    logger.info("Parsed %s config: grid nx=%s nt=%d T=%g", kind.value, grid.nx, grid.nt, grid.T)
    return config
