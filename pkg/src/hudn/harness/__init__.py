from .config import ConfigError, ExperimentConfig, load_config, parse_config_text
from .experiment import (
    Instance,
    SweepReport,
    SweepRow,
    emit_reports,
    make_instance,
    run_one,
    run_scenario,
    run_trial,
    summarize,
    sweep_network_size,
)
