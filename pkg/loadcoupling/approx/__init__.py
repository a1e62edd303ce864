from .bounds import LoadBounds, global_load_bounds, interference_interval
from .segments import (
    LinearizationMode,
    LinearSegment,
    SegmentTable,
    build_segment_table,
    interference_cap,
    linearize,
    option_intervals,
    segment_table_from_intervals,
    ue_load_derivative,
    ue_load_of_interference,
)
