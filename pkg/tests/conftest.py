from pathlib import Path

import pytest

import prefkit as pk

REPO_ROOT = Path(__file__).resolve().parents[1]
CATALOG_PATH = REPO_ROOT / "data" / "catalog.csv"


@pytest.fixture(scope="session")
def catalog20() -> pk.ItemCatalog:
    return pk.load_catalog(CATALOG_PATH)


@pytest.fixture(scope="session")
def constraint() -> pk.SelectionConstraint:
    return pk.SelectionConstraint()


@pytest.fixture(scope="session")
def survey(catalog20, constraint):
    """A 200 x 20 planted-kit population: (prefs, planted, kits)."""
    kits = pk.random_kits(catalog20, constraint, 8, seed=pk.derive_seed(99, "fixture-kits"))
    spec = pk.SyntheticSpec(
        n_users=200, planted_kits=kits, noise_swaps=1, seed=pk.derive_seed(99, "fixture-pop")
    )
    prefs, planted = pk.generate_synthetic(spec, catalog20, constraint)
    return prefs, planted, kits


@pytest.fixture
def catalog_factory():
    """Build a catalog with the given number of expensive and cheap items."""

    def _make(n_expensive: int, n_cheap: int) -> pk.ItemCatalog:
        items = [
            pk.Item(i, f"exp_{i}", pk.Category.EXPENSIVE) for i in range(n_expensive)
        ] + [
            pk.Item(n_expensive + j, f"cheap_{j}", pk.Category.CHEAP)
            for j in range(n_cheap)
        ]
        return pk.ItemCatalog(tuple(items))

    return _make
