# Services module for the GECL lab
from .coefficient_service import CoefficientService, build_coefficient
from .assumption_validator import AssumptionValidator
from .zone_service import ZoneService
from .integrator import DormandPrince45
from .propagator_service import PropagatorService
from .diagonalizer_service import DiagonalizerService
from .floquet_service import FloquetService
from .energy_service import EnergyService
from .export_service import ExportService

__all__ = [
    'CoefficientService',
    'build_coefficient',
    'AssumptionValidator',
    'ZoneService',
    'DormandPrince45',
    'PropagatorService',
    'DiagonalizerService',
    'FloquetService',
    'EnergyService',
    'ExportService',
]
