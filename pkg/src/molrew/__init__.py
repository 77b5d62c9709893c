"""molrew: a port-graph rewrite engine with a lambda-calculus front-end.

Molecules are open port graphs in mol notation; chemistries (chemlambda-v2,
ic, diric) are declarative node/rule tables; the engine runs seeded,
replayable reduction cycles with conflict resolution, quine detection and
trace/statistics export.
"""

from .graph import (
    Boundary,
    IsoSizeError,
    MolError,
    MolParseError,
    Molecule,
    Node,
    NodeKind,
    PortSlot,
    canonical_certificate,
    close_boundary,
    connected_components,
    iso_check,
    is_valid,
    molecule,
    parse_mol,
    pattern_equal,
    serialize_mol,
    validate,
)
from .chemistry import (
    BUILTIN_CHEMISTRIES,
    Chemistry,
    ChemistryError,
    KindTranslation,
    RewriteRule,
    active_ports,
    active_port_roles,
    builtin_chemistry,
    builtin_translation,
    check_shuffle,
    load_chemistry,
    load_translation,
    translate,
)
from .engine import (
    CycleReport,
    EngineError,
    Match,
    QuineOutcome,
    ReductionConfig,
    Trace,
    apply_matches,
    comb_pass,
    conflicting_pairs,
    cycle,
    find_matches,
    quine_check,
    reduce,
    replay_check,
    resolve_conflicts,
    stats,
    stats_csv,
)
from .lam import (
    COMBINATORS,
    App,
    Lam,
    LambdaError,
    LambdaParseError,
    Term,
    Var,
    alpha_equal,
    church,
    library_term,
    normal_order_reduce,
    parse_lambda,
    show,
    to_molecule,
)
from .rng import SplitMix64
from .search import QuineHit, search_quines

__version__ = "0.1.0"
