from .adjustment import (
    AdjustmentDecision,
    AdjustmentState,
    Trigger,
    try_add_link,
    try_remove_link,
)
from .minl import (
    AdjustmentRecord,
    MinlOptions,
    MinlResult,
    minl,
    neighborhood,
    run_minl,
)
