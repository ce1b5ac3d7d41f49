"""Kit synthesis: rank items by within-cluster selection frequency.

A kit is an exact-size item set.  The default ranking takes a flat top
``constraint.total`` regardless of category; constrained mode instead fills
each category's quota separately.  Ties always break toward the lowest
item id so kit design is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import Category, ItemCatalog, PreferenceMatrix, SelectionConstraint


@dataclass(frozen=True)
class Kit:
    """A fixed-size set of item ids distributed to one cluster of users."""

    kit_id: int
    items: frozenset[int]

    def sorted_items(self) -> list[int]:
        return sorted(self.items)

    def indicator(self, m: int) -> np.ndarray:
        """Length-m 0/1 vector marking the kit's items."""
        vec = np.zeros(m, dtype=np.int8)
        vec[self.sorted_items()] = 1
        return vec


def validate_kit(
    kit: Kit,
    catalog: ItemCatalog,
    constraint: SelectionConstraint,
    constrained: bool = True,
) -> None:
    """Raise unless the kit has the right size (and, if asked, quota split)."""
    if not all(0 <= q < catalog.m for q in kit.items):
        raise ValueError(f"kit {kit.kit_id}: item ids must lie in 0..{catalog.m - 1}")
    if len(kit.items) != constraint.total:
        raise ValueError(
            f"kit {kit.kit_id}: has {len(kit.items)} items, expected {constraint.total}"
        )
    if constrained:
        expensive = set(catalog.ids_in(Category.EXPENSIVE))
        n_exp = sum(1 for q in kit.items if q in expensive)
        if n_exp != constraint.expensive_quota:
            raise ValueError(
                f"kit {kit.kit_id}: {n_exp} expensive items, "
                f"expected {constraint.expensive_quota}"
            )


@dataclass(frozen=True)
class FrequencyProfile:
    """Per-item selection counts within one cluster."""

    cluster_id: int
    counts: np.ndarray
    cluster_size: int


def frequency_profile(
    prefs: PreferenceMatrix,
    member_indices: Sequence[int],
    cluster_id: int = 0,
) -> FrequencyProfile:
    """Count how often each item was selected by the given cluster members."""
    members = list(member_indices)
    if not members:
        raise ValueError("cluster has no members")
    counts = prefs.data[members].sum(axis=0, dtype=np.int64)
    counts.flags.writeable = False
    return FrequencyProfile(cluster_id=cluster_id, counts=counts, cluster_size=len(members))


def top_items(values: np.ndarray, count: int) -> list[int]:
    """Indices of the ``count`` largest values; ties go to the lowest index."""
    order = np.argsort(-np.asarray(values, dtype=np.float64), kind="stable")
    return sorted(int(q) for q in order[:count])


def _top_items_constrained(
    values: np.ndarray, catalog: ItemCatalog, constraint: SelectionConstraint
) -> list[int]:
    chosen: list[int] = []
    for category, quota in (
        (Category.EXPENSIVE, constraint.expensive_quota),
        (Category.CHEAP, constraint.cheap_quota),
    ):
        ids = np.array(catalog.ids_in(category))
        order = np.argsort(-np.asarray(values, dtype=np.float64)[ids], kind="stable")
        chosen.extend(int(q) for q in ids[order[:quota]])
    return sorted(chosen)


def design_kit(
    profile: FrequencyProfile,
    catalog: ItemCatalog,
    constraint: SelectionConstraint,
    constrained: bool = False,
) -> Kit:
    """Build one kit from a frequency profile by top-count ranking."""
    if catalog.m < constraint.total:
        raise ValueError("catalog smaller than kit size")
    if constrained:
        constraint.check_catalog(catalog)
        items = _top_items_constrained(profile.counts, catalog, constraint)
    else:
        items = top_items(profile.counts, constraint.total)
    return Kit(kit_id=profile.cluster_id, items=frozenset(items))


def design_all(
    prefs: PreferenceMatrix,
    clustering: Mapping[int, Sequence[int]],
    catalog: ItemCatalog,
    constraint: SelectionConstraint,
    constrained: bool = False,
) -> list[Kit]:
    """One kit per non-empty cluster, ordered by cluster id.

    Kit ids are sequential in that order (equal to cluster ids when no
    cluster is empty).  Empty clusters yield no kit.
    """
    if not any(len(members) for members in clustering.values()):
        raise ValueError("clustering has no members")
    kits: list[Kit] = []
    for cluster_id in sorted(clustering):
        members = clustering[cluster_id]
        if not len(members):
            continue
        profile = frequency_profile(prefs, members, cluster_id=len(kits))
        kits.append(design_kit(profile, catalog, constraint, constrained))
    return kits
