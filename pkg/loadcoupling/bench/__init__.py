from .experiment import (
    METHODS,
    ExperimentConfig,
    ExperimentReport,
    ExperimentRow,
    calibrate_demands,
    run_experiment,
    run_experiments,
)
from .oracle import (
    MAX_ASSOCIATIONS,
    brute_force_optimum,
    count_associations,
    enumerate_associations,
    find_feasible_association,
)
from .report import (
    CSV_COLUMNS,
    emit_report,
    load_csv_report,
    render_report,
    summarize,
    summarize_csv,
)
