from .branch_and_bound import (
    BranchAndBoundOptions,
    CompiledModel,
    MilpSolution,
    SolveStatus,
    compile_model,
    solve_branch_and_bound,
)
from .lp_format import export_lp, read_lp
from .model import (
    Constraint,
    MilpModel,
    Sense,
    Variable,
    VariableKind,
    build_milp,
)
from .stages import (
    MilpOptions,
    MilpPipeline,
    MilpRun,
    milp_pipeline,
    run_milp,
)
