"""Second nilpotent products of groups, their wreath products, and exact
kernel certificates, all in exact integer and rational arithmetic."""

from .abelian import (
    AbelianElement,
    FGAbelian,
    IntMatrix,
    from_relations,
    snf,
    tensor,
    tensor_elem,
    tensor_grid,
)
from .groups import (
    CyclicGroup,
    DihedralGroup,
    DirectSumGroup,
    Group,
    HeisenbergGroup,
    InfiniteGroupError,
    IntegerGroup,
    PermutationGroup,
    SubgroupView,
    alternating,
    derived_subgroup,
    lower_central_series,
    nilpotency_class,
    normal_closure,
    subgroup_generated,
    symmetric,
)
from .nilprod2 import Nil2Element, Nil2Group, NotCentralError, heisenberg_witness, nil2
from .nilfam import (
    FamElement,
    FamilyGroup,
    FiniteIndexSet,
    GroupIndexSet,
    family,
    flatten,
    regroup,
    regroup_group,
    shift_family,
)
from .wreath import ClassicalWreathGroup, WreathElement, WreathGroup, quotient_to_classical
from .haagerup import (
    PairKernel,
    delta_kernel,
    gram_value,
    pair_value,
    properness_box_check,
    sublevel_set,
    u_value,
    u_value_direct,
)
from .oracle import claims_suite, enumerate_group, find_isomorphism, verify_isomorphism

__version__ = "0.1.0"
