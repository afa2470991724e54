"""Parameter records and model builders for the four systems."""

from .converters import (
    build_eomc_drift,
    build_eomc_lindblad,
    build_opd_drift,
    build_opd_lindblad,
    eomc_derived,
    opd_derived,
)
from .params import EomcParams, HemtParams, OpdParams, QubitParams
from .thermal import BathSpec, thermal_occupation
