"""Snake graphs, their perfect matching lattices, string submodule lattices,
weak Bruhat intervals, and the resolution calculus tying them together."""

from .words import (
    ArrowWord,
    DIRECT,
    INVERSE,
    RunDecomposition,
    WordSyntaxError,
    decompose_runs,
    inverse,
    parse_word,
    render_word,
)
from .snake import (
    OverlapWindow,
    RIGHT,
    SnakeGraph,
    UP,
    arrow_function,
    build_snake,
    canonical_word,
    recover_word,
    restrict,
)
from .matchings import (
    EnclosedDecomposition,
    PerfectMatching,
    enclosed_tiles,
    enumerate_matchings,
    matching_lattice,
    maximal_matching,
    minimal_matching,
    rotate_tile,
    symmetric_difference,
)
from .lattice import (
    CoverLattice,
    Poset,
    is_distributive,
    join_irreducibles,
    labeled_isomorphic,
    order_ideals,
)
from .modules import (
    CanonicalSubmodule,
    StringModule,
    count_submodules,
    join_irreducible_poset_from_string,
    matching_to_submodule,
    submodule_lattice,
    submodule_to_matching,
)
from .bruhat import (
    coxeter_element,
    reduced_words,
    verify_three_way,
    weak_interval,
)
from .calculus import (
    Crossing,
    Grafting,
    PhiMachine,
    Resolution,
    find_crossings,
    phi,
    resolve_crossing,
    resolve_grafting,
)
