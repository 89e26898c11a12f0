import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.simulation.models import ExperimentGeometry, InitialDatum, PathGrid, PotentialSpec, as_point
from src.utils.errors import DomainError


def test_potential_cap_and_sup():
    pot = PotentialSpec(c=0.5, beta=2.0)
    r = np.array([0.0, 0.5, 2.0])
    assert np.isinf(pot.raw(r)[0])
    assert not pot.bounded
    capped = pot.capped(3.0)
    assert np.allclose(capped.evaluate(r), [3.0, 2.0, 0.125])
    assert capped.sup == 3.0
    assert pot.cap is None


def test_shifted_and_constant_potentials_are_bounded():
    assert PotentialSpec(c=1.0, beta=1.0, shift=0.5).sup == pytest.approx(2.0)
    assert PotentialSpec(c=0.3, beta=0.0).sup == 0.3
    assert PotentialSpec(c=0.0).sup == 0.0


def test_potential_guards():
    pot = PotentialSpec(c=0.2)
    with pytest.raises(DomainError):
        pot.require_cap("here")
    with pytest.raises(DomainError):
        pot.require_flavor("boundary", "here")
    with pytest.raises(ValidationError):
        PotentialSpec(c=-1.0)
    with pytest.raises(ValidationError):
        PotentialSpec(c=1.0, strength=2.0)


def test_initial_datum_kinds():
    points = np.array([[0.0, 0.0], [1.5, 0.0]])
    assert np.allclose(InitialDatum(kind="gaussian_bump").evaluate(points), [1.0, math.exp(-1.125)])
    assert np.allclose(InitialDatum(kind="box_indicator").evaluate(points), [1.0, 0.0])
    assert np.allclose(InitialDatum(kind="constant_one", amplitude=2.0).evaluate(points), [2.0, 2.0])


def test_halfspace_box_uses_normal_interval():
    box = InitialDatum(kind="box_indicator", radius=1.0, interval=(0.2, 1.0))
    lateral = np.zeros((3, 1))
    assert np.allclose(box.evaluate_halfspace(lateral, np.array([0.1, 0.5, 1.5])), [0.0, 1.0, 0.0])


def test_initial_datum_validation():
    with pytest.raises(ValidationError):
        InitialDatum(interval=(1.0, 0.5))
    with pytest.raises(DomainError):
        InitialDatum(center=(1.0, 0.0)).center_in(3)
    with pytest.raises(DomainError):
        InitialDatum(center=(1.0, 0.0)).radial(np.array([0.0]))


def test_support_radius():
    assert InitialDatum(kind="gaussian_bump", radius=0.5).support_radius() == 4.0
    assert InitialDatum(kind="box_indicator", center=(3.0, 4.0)).support_radius() == 6.0
    assert math.isinf(InitialDatum(kind="constant_one").support_radius())


def test_geometry_defaults_and_checks():
    geo = ExperimentGeometry()
    assert geo.gamma == pytest.approx(0.5)
    assert np.array_equal(geo.disc_center_in(3), np.zeros(3))
    with pytest.raises(ValidationError):
        ExperimentGeometry(interval=(0.0, 1.0))
    with pytest.raises(ValidationError):
        ExperimentGeometry(a=0.5)


def test_path_grid_steps():
    grid = PathGrid(t_end=1.0, dt=0.3, n_paths=10)
    n_steps, h = grid.steps()
    assert n_steps == 4 and h == pytest.approx(0.25)
    assert grid.steps(0.3) == (1, pytest.approx(0.3))
    with pytest.raises(DomainError):
        grid.steps(1.5)
    with pytest.raises(ValidationError):
        PathGrid(t_end=0.1, dt=0.2, n_paths=10)


def test_as_point():
    assert np.array_equal(as_point(2.0, 3), [2.0, 0.0, 0.0])
    assert np.array_equal(as_point((1.0, 2.0), 2), [1.0, 2.0])
    with pytest.raises(DomainError):
        as_point((1.0, 2.0), 3)
