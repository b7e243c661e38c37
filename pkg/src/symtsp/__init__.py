"""Heuristic symmetric TSP solver built on perfect matchings and cycle patching."""
from importlib import resources

from .instance import CostMatrix, InstanceError, load_matrix, neighbor_rank, random_matrix
from .permutation import PerfectMatching, Permutation, Tour, derangement_value, pm_from_tour, pm_value, tour_value
from .patcher import SolveConfig, solve

__all__ = [
    "CostMatrix", "InstanceError", "PerfectMatching", "Permutation", "SolveConfig", "Tour",
    "derangement_value", "fixture_names", "load_fixture", "load_matrix", "neighbor_rank",
    "pm_from_tour", "pm_value", "random_matrix", "solve", "tour_value",
]

# tours the fixtures are paired with
EXAMPLE4_START_TOUR = (11, 17, 12, 10, 6, 18, 13, 3, 1, 7, 4, 8, 16, 14, 19, 15, 20, 9, 2, 5)


def fixture_names():
    return sorted(p.name[:-4] for p in resources.files(__name__).joinpath("fixtures").iterdir()
                  if p.name.endswith(".txt"))


def load_fixture(name: str) -> CostMatrix:
    """Bundled instance by name, e.g. ``example4``."""
    path = resources.files(__name__).joinpath("fixtures", f"{name}.txt")
    if not path.is_file():
        raise InstanceError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return load_matrix(path.read_text())
