# gecl/config.py
"""
Central experiment configuration for the GECL lab.
Uses dataclasses for type-safe configuration management; documents are JSON.
"""
import dataclasses
import json
import math
import typing
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .logging_config import get_logger

logger = get_logger('config')

CONFIG_SCHEMA_VERSION = 1


class ConfigError(Exception):
    """Raised when a configuration document is malformed or inconsistent."""
    pass


class Family(str, Enum):
    """
    Shape-function families.

    - POLYNOMIAL: λ(t) = (1+t)^p
    - SUPRAPOLYNOMIAL: λ(t) = exp(t^α)
    - EXPONENTIAL: λ(t) = e^t
    - CONSTANT: λ ≡ 1 (free-wave control)
    """
    POLYNOMIAL = "polynomial"
    SUPRAPOLYNOMIAL = "suprapolynomial"
    EXPONENTIAL = "exponential"
    CONSTANT = "constant"


class PerturbationKind(str, Enum):
    """Which oscillating factor ω(t) multiplies the shape function."""
    NONE = "none"
    ADMISSIBLE = "admissible"
    COUNTEREXAMPLE = "counterexample"


class ProfileKind(str, Enum):
    """Radial spectral profile for Cauchy data."""
    ANNULUS = "annulus"   # smooth plateau vanishing at both ends
    BALL = "ball"         # reaches down to |ξ| = 0, cut off at ρ_hi only


EXPERIMENT_NAMES = (
    "validate", "zones", "propagate", "diag", "floquet", "counterexample", "energy",
)


@dataclass
class BumpConfig:
    """Plateau bump ψ used by every perturbation."""
    smoothness_order: int = 4
    plateau_lo: float = 0.1
    plateau_hi: float = 0.9


@dataclass
class CoefficientConfig:
    """Coefficient a(t) = λ(t)ω(t) together with its scale set."""
    family: Family = Family.POLYNOMIAL

    # Shape parameters
    p: float = 2.0            # polynomial exponent
    alpha: float = 0.5        # suprapolynomial exponent

    # Scale parameters (None -> window default)
    q: float = 1.0
    theta_exponent: Optional[float] = None   # polynomial Θ = (1+t)^theta_exponent, default 1+q
    r: Optional[float] = None                # polynomial Ξ exponent, default r_m
    beta: float = 0.5
    gamma: Optional[float] = None            # suprapolynomial Ξ exponent, default γ_m
    a: float = 0.5
    b: Optional[float] = None                # exponential Ξ rate, default b_m
    m: int = 2
    N: float = 10.0
    m_max: int = 4

    # Perturbation
    perturbation: PerturbationKind = PerturbationKind.NONE
    epsilon: float = 0.5
    sigma: float = 2.0
    j_max: int = 12

    # Explicit sequence overrides (replace the generated sequences)
    t_seq: Optional[List[float]] = None
    delta_seq: Optional[List[float]] = None
    eta_seq: Optional[List[float]] = None
    nu_seq: Optional[List[int]] = None

    bump: BumpConfig = field(default_factory=BumpConfig)


@dataclass
class GridConfig:
    """Validation / zone-supremum time grid."""
    t_max: float = 1000.0
    points_per_decade: int = 64
    packet_points: int = 32


@dataclass
class ValidatorConfig:
    """Assumption certification variants."""
    a4_epsilon: float = 0.1          # exponent in the (A4'') right-hand side
    a5prime_epsilon: float = 0.5     # Λ^ε ≲ Θ
    variants: List[str] = field(default_factory=lambda: ["A4", "A4prime", "A4doubleprime"])


@dataclass
class IntegratorConfig:
    """Embedded Runge-Kutta 4(5) settings."""
    tol: float = 1e-10
    safety: float = 0.9
    max_steps: int = 5_000_000
    period_fraction: float = 0.125    # step cap as a fraction of the local period
    renormalize_above: float = 1e100
    assert_liouville: bool = True
    liouville_tol: float = 1e-8       # relaxed to 100·tol for coarse tolerances


@dataclass
class PropagatorTask:
    """One entry of a batch run manifest."""
    s: float = 0.0
    t: float = 1.0
    xi: float = 1.0
    tol: float = 1e-10


@dataclass
class PropagatorConfig:
    """Zone-wise propagator verification runs."""
    xi_min: float = 0.05
    xi_max: float = 5.0
    xi_count: int = 16
    t_max: float = 1000.0
    points_per_decade: int = 16
    two_sided_constant: float = 20.0
    hyp_constant: float = 50.0
    pd_constant: float = 20.0
    drift_limit: float = 0.05
    peano_baker_terms: int = 8
    phase_budget: float = 2.0e4       # largest Λ(T)|ξ| integrated by the zone checks
    tol: float = 1e-9
    tasks: List[PropagatorTask] = field(default_factory=list)


@dataclass
class DiagonalizerConfig:
    """Diagonalization hierarchy checks."""
    k_max: int = 2
    sample_count: int = 100
    use_finite_differences: bool = False
    fd_step: float = 1e-5
    warn_threshold: float = 0.9
    xi_count: int = 4


@dataclass
class FloquetConfig:
    """Hill-system monodromy sweeps and instability search."""
    search_lo: float = 0.05
    search_hi: float = 4.0 * math.pi
    scan_step: float = 1e-2
    refine_tol: float = 1e-6
    margin: float = 1e-6
    sweep_points: int = 400
    shrink: float = 0.1
    test_points: int = 16
    tol: float = 1e-11


@dataclass
class CounterexampleConfig:
    """Packet amplification and blow-up condition."""
    j_list: List[int] = field(default_factory=lambda: list(range(1, 9)))
    xi_count: int = 3
    admissible_ceiling: float = 4.0
    blowup_j_max: int = 12
    measure_periods: bool = True


@dataclass
class EnergyConfig:
    """Energy traces for spectrally given Cauchy data."""
    dimension: int = 1
    profile: ProfileKind = ProfileKind.ANNULUS
    rho_lo: float = 1.0
    rho_hi: float = 2.0
    amplitude_u1: float = 1.0
    amplitude_u2: float = 1.0
    quad_points: int = 48
    t_max: float = 100.0
    points_per_decade: int = 16
    drift_limit: float = 0.05


@dataclass
class OutputConfig:
    """Artifact output."""
    directory: str = "results"
    xlsx: bool = False


@dataclass
class AppConfig:
    """Main experiment configuration combining all sub-configs."""
    coefficient: CoefficientConfig = field(default_factory=CoefficientConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    validator: ValidatorConfig = field(default_factory=ValidatorConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    propagator: PropagatorConfig = field(default_factory=PropagatorConfig)
    diagonalizer: DiagonalizerConfig = field(default_factory=DiagonalizerConfig)
    floquet: FloquetConfig = field(default_factory=FloquetConfig)
    counterexample: CounterexampleConfig = field(default_factory=CounterexampleConfig)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    experiments: List[str] = field(default_factory=list)
    seed: int = 20240101
    threads: int = 1
    schema_version: int = CONFIG_SCHEMA_VERSION

    def experiment_list(self) -> List[str]:
        """Expand ``all`` and drop duplicates, keeping the given order."""
        names: List[str] = []
        for name in self.experiments:
            expanded = EXPERIMENT_NAMES if name == "all" else (name,)
            for item in expanded:
                if item not in names:
                    names.append(item)
        return names


# ---------------------------------------------------------------------------
# (De)serialisation
# ---------------------------------------------------------------------------

def _convert(value: Any, annotation: Any, path: str) -> Any:
    origin = typing.get_origin(annotation)
    args = typing.get_args(annotation)

    if origin is Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _convert(value, inner[0], path)

    if origin in (list, List):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {type(value).__name__}")
        return [_convert(item, args[0], f"{path}[{i}]") for i, item in enumerate(value)]

    if dataclasses.is_dataclass(annotation):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected an object, got {type(value).__name__}")
        return _build(annotation, value, path)

    if isinstance(annotation, type) and issubclass(annotation, Enum):
        try:
            return annotation(value)
        except ValueError:
            allowed = ", ".join(member.value for member in annotation)
            raise ConfigError(f"{path}: '{value}' is not one of {allowed}") from None

    if annotation is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false")
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            raise ConfigError(f"{path}: expected an integer")
        return int(value)
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        return float(value)
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string")
        return value
    return value


def _build(cls: type, data: Dict[str, Any], path: str) -> Any:
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError(f"unknown key(s): {', '.join(prefix + key for key in unknown)}")

    kwargs = {}
    for name, value in data.items():
        dotted = f"{path}.{name}" if path else name
        kwargs[name] = _convert(value, hints[name], dotted)
    return cls(**kwargs)


def config_from_dict(data: Dict[str, Any]) -> AppConfig:
    """
    Build an AppConfig from a plain dict, rejecting unknown keys.

    Args:
        data: Parsed configuration document

    Returns:
        AppConfig instance

    Raises:
        ConfigError: On unknown keys, wrong types or unknown experiment names
    """
    config = _build(AppConfig, data, "")
    for name in config.experiments:
        if name != "all" and name not in EXPERIMENT_NAMES:
            raise ConfigError(f"experiments: unknown experiment '{name}'")
    if config.threads < 1:
        raise ConfigError("threads: must be >= 1")
    return config


def config_to_dict(config: AppConfig) -> Dict[str, Any]:
    """Serialise an AppConfig to JSON-compatible primitives."""
    def _plain(value: Any) -> Any:
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, dict):
            return {k: _plain(v) for k, v in value.items()}
        if isinstance(value, list):
            return [_plain(v) for v in value]
        return value

    return _plain(dataclasses.asdict(config))


def load_config(config_path: Optional[Union[str, Path]] = None) -> AppConfig:
    """
    Load configuration from a JSON file or return defaults.

    Args:
        config_path: Optional path to JSON config file

    Returns:
        AppConfig instance with loaded or default values

    Raises:
        ConfigError: If the file cannot be parsed or fails strict validation
    """
    if config_path is None:
        return AppConfig()

    path = Path(config_path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level document must be an object")

    config = config_from_dict(data)
    logger.debug(f"Loaded config from {path} (family={config.coefficient.family.value})")
    return config
