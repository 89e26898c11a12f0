import math

import numpy as np
import pytest

from src.pde.radial_heat import RadialGrid, heat_reference, radial_heat_solve
from src.simulation.models import InitialDatum, PotentialSpec
from src.utils.errors import DomainError

FREE = PotentialSpec(c=0.0, cap=1.0)
BUMP = InitialDatum(kind="gaussian_bump", radius=1.0)
RADII = np.array([0.0, 0.5, 1.0, 2.0])


@pytest.mark.parametrize("N", [2, 3, 5])
def test_free_solution_matches_closed_form(N):
    field = radial_heat_solve(N, FREE, BUMP, 0.5)
    assert np.allclose(field.at(RADII), heat_reference(N, BUMP, 0.5, RADII), rtol=1e-3)
    assert field.boundary_mass < 1e-6


def test_constant_potential_multiplies_by_exponential():
    c, t = 0.3, 0.8
    field = radial_heat_solve(3, PotentialSpec(c=c, beta=0.0, cap=1.0), BUMP, t)
    expected = math.exp(c * t) * heat_reference(3, BUMP, t, RADII)
    assert np.allclose(field.at(RADII), expected, rtol=1e-3)


def test_second_order_convergence():
    t = 0.5
    exact = heat_reference(3, BUMP, t, 0.0)
    errors = []
    for n_r, n_t in ((101, 50), (201, 100), (401, 200)):
        field = radial_heat_solve(3, FREE, BUMP, t, RadialGrid(r_max=10.0, n_r=n_r, n_t=n_t))
        errors.append(abs(field.at(0.0) - exact))
    assert 3.2 < errors[0] / errors[1] < 4.8
    assert 3.2 < errors[1] / errors[2] < 4.8


def test_solution_grows_with_the_cap():
    pot = PotentialSpec(c=0.3, beta=2.0)
    low = radial_heat_solve(3, pot.capped(2.0), BUMP, 0.5)
    high = radial_heat_solve(3, pot.capped(4.0), BUMP, 0.5)
    free = heat_reference(3, BUMP, 0.5, RADII)
    assert np.all(high.at(RADII) > low.at(RADII))
    assert np.all(low.at(RADII) > free)


def test_capped_solution_below_exponential_bound():
    m, t = 4.0, 0.5
    field = radial_heat_solve(3, PotentialSpec(c=0.3, cap=m), BUMP, t)
    assert np.all(field.at(RADII) <= math.exp(m * t) * heat_reference(3, BUMP, t, RADII))


def test_box_datum_close_to_closed_form():
    box = InitialDatum(kind="box_indicator", radius=1.0)
    field = radial_heat_solve(3, FREE, box, 0.5, RadialGrid(n_r=1601, n_t=800))
    radii = np.array([0.0, 0.5, 1.5])
    assert np.allclose(field.at(radii), heat_reference(3, box, 0.5, radii), rtol=1e-2)


def test_field_vanishes_beyond_outer_radius():
    field = radial_heat_solve(3, FREE, BUMP, 0.2)
    assert field.at(field.r_max + 1.0) == 0.0
    assert field.values[-1] == 0.0
    assert field.radii.shape == field.values.shape


def test_heat_reference_limits():
    constant = InitialDatum(kind="constant_one", amplitude=2.5)
    assert heat_reference(4, constant, 3.0, 1.0) == 2.5
    box = InitialDatum(kind="box_indicator", radius=1.0)
    assert heat_reference(3, box, 1e-4, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert heat_reference(3, box, 1e-4, 2.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"N": 1, "pot": PotentialSpec(c=0.3, cap=1.0), "u0_radial": BUMP},
        {"N": 3, "pot": PotentialSpec(c=0.3), "u0_radial": BUMP},
        {"N": 3, "pot": PotentialSpec(c=0.3, cap=1.0, flavor="boundary"), "u0_radial": BUMP},
        {"N": 3, "pot": PotentialSpec(c=0.3, cap=1.0), "u0_radial": InitialDatum(kind="constant_one")},
        {"N": 3, "pot": PotentialSpec(c=0.3, cap=1.0), "u0_radial": InitialDatum(center=(1.0, 0.0, 0.0))},
    ],
)
def test_rejects_unsupported_problems(kwargs):
    with pytest.raises(DomainError):
        radial_heat_solve(t=0.5, **kwargs)


def test_rejects_support_beyond_outer_radius():
    with pytest.raises(DomainError):
        radial_heat_solve(3, FREE, BUMP, 0.5, RadialGrid(r_max=5.0))
