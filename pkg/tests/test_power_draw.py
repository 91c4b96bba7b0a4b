import pytest

from ranloop.sim import ue_power_draw
from oracles import solve_power_coeff


def test_default_coeff_reproduces_200mw_delta():
    # frozen from the reference solve: 200 / (10^2 - 10^1) = 2.2222...
    exact = solve_power_coeff(200.0, 20.0, 10.0)
    assert exact == pytest.approx(2.2222222, abs=1e-6)
    # shipped default 2.22 lands within a milliwatt-scale neighborhood
    delta = ue_power_draw(20.0) - ue_power_draw(10.0)
    assert delta == pytest.approx(199.8, abs=1e-9)
    assert abs(delta - 200.0) < 2.0


def test_strictly_monotone():
    levels = [-40.0, -20.0, -5.0, 0.0, 3.0, 10.0, 17.0, 23.0]
    draws = [ue_power_draw(x) for x in levels]
    assert all(b > a for a, b in zip(draws, draws[1:]))


def test_floor_at_minimum_power():
    assert abs(ue_power_draw(-40.0) - 2000.0) < 1.0


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        ue_power_draw(24.0)
    with pytest.raises(ValueError):
        ue_power_draw(-41.0)
