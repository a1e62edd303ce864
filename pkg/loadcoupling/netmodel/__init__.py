from .channel import (
    MACRO_LAW,
    SMALL_LAW,
    ChannelConfig,
    PathLossLaw,
    link_gain,
)
from .entities import (
    Association,
    Cell,
    CellKind,
    NetworkInstance,
    UserEquipment,
    association_options,
    with_uniform_demand,
)
from .hexnet import (
    ScenarioConfig,
    assign_home_and_candidates,
    generate_hexnet,
    hexagon_centers,
)
from .sat import (
    CnfFormula,
    GadgetLayout,
    association_for_assignment,
    build_sat_reduction,
    format_dimacs,
    is_satisfiable,
    parse_dimacs,
    random_3cnf,
    satisfying_assignment,
    truth_assignment_from_association,
)
from .scenario_file import (
    dumps_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
