"""Shared fixtures for the test suite."""

import pytest

from otlab import Euclidean, Interval, Product


@pytest.fixture
def unit_interval():
    return Interval(1)


@pytest.fixture
def snowflake_plane():
    """Product(alpha=1/2, q=2) over the Euclidean plane, float flavor."""
    return Product(0.5, 2, Euclidean(2))


@pytest.fixture
def city_block_square():
    """The exact l1 square: alpha = q = 1 over a unit-interval base."""
    return Product(1, 1, Interval(1))


@pytest.fixture
def small_tree():
    """Five points on a path-with-branch tree, integer edge lengths."""
    from otlab.campaign import five_point_tree_space

    return five_point_tree_space()


def write_measure_file(path, space_id, atom_lines):
    path.write_text(f"space {space_id}\n" + "\n".join(atom_lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def measure_file(tmp_path):
    """Factory writing measure files into the test's tmp dir."""
    counter = [0]

    def make(atom_lines, space_id="s"):
        counter[0] += 1
        return write_measure_file(tmp_path / f"m{counter[0]}.txt", space_id, atom_lines)

    return make
