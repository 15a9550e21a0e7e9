# Domain value types for the GECL lab
from .shape import ShapeFunction
from .scales import ScaleSet
from .perturbation import BumpProfile, PerturbationKindTag, PerturbationProfile
from .coefficient import Coefficient
from .zone import Zone, ZoneBoundaries, ZonePoint
from .propagator import PropagatorMatrix, PropagatorSamples, SystemForm, SystemMatrix
from .diagonalizer import DiagonalizerState, SymbolClassTag
from .floquet import AmplificationRun, BlowupReport, InstabilityInterval, MonodromyResult, PhaseClass
from .energy import CauchyData, EnergyTrace
from .reports import (
    CheckReport,
    EntryBoundReport,
    StabilisationReport,
    TwoSidedReport,
    ValidationReport,
    Verdict,
)
from .experiment import ExperimentResult, ExperimentStatus

__all__ = [
    'ShapeFunction',
    'ScaleSet',
    'BumpProfile',
    'PerturbationKindTag',
    'PerturbationProfile',
    'Coefficient',
    'Zone',
    'ZoneBoundaries',
    'ZonePoint',
    'PropagatorMatrix',
    'PropagatorSamples',
    'SystemForm',
    'SystemMatrix',
    'DiagonalizerState',
    'SymbolClassTag',
    'AmplificationRun',
    'BlowupReport',
    'InstabilityInterval',
    'MonodromyResult',
    'PhaseClass',
    'CauchyData',
    'EnergyTrace',
    'CheckReport',
    'EntryBoundReport',
    'StabilisationReport',
    'TwoSidedReport',
    'ValidationReport',
    'Verdict',
    'ExperimentResult',
    'ExperimentStatus',
]
