"""Default size caps. Operations fail loudly past a cap instead of degrading."""

CLOSURE_CAP = 200_000
"""Maximum number of elements enumerated when closing a permutation group."""

SEARCH_VERTEX_CAP = 40
"""Maximum digraph order accepted by the isomorphism/automorphism search."""

AUT_ORDER_CAP = 24
"""Maximum group order for automorphism and subgroup enumeration."""

GROUP_ORDER_CAP = 200
"""Maximum order for multiplication-table construction."""

BLOCK_DEGREE_CAP = 24
"""Maximum degree for exhaustive block-system search."""

WREATH_VERTEX_CAP = 1024
"""Maximum vertex count of a digraph wreath product."""


class CapExceeded(RuntimeError):
    """An operation would exceed its configured size cap."""
