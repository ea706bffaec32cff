"""Run-wide knobs: search budgets, site truncation bounds, operad table caps."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Budget:
    # search nodes allowed per oracle call before SearchBudgetExceeded
    nodes: int = 10**6


@dataclass(frozen=True)
class SiteBounds:
    max_vertices: int = 3
    max_edges: int = 6
    max_arity: int = 3


@dataclass(frozen=True)
class OperadCaps:
    # longest profile tabulated, and most operations per profile
    max_arity: int = 4
    max_ops_per_profile: int = 16


DEFAULT_BUDGET = Budget()
DEFAULT_BOUNDS = SiteBounds()
DEFAULT_CAPS = OperadCaps()

# bounds for hom-set-heavy presheaf sites; the full DEFAULT_BOUNDS site is
# still used for the per-graph oracles (Emb bijection, shape checks)
SMALL_BOUNDS = SiteBounds(max_vertices=2, max_edges=4, max_arity=3)


def with_overrides(base, **kw):
    return replace(base, **{k: v for k, v in kw.items() if v is not None})
