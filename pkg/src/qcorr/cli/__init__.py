"""Configuration loading, run orchestration and the ``qcorr`` command."""

from .config import RunConfig, config_from_dict, load_config
from .runner import RunReport, converge_truncation, run, sweep
