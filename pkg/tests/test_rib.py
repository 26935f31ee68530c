import math

import numpy as np
import pytest

import grrsim as g
from grrsim.core import Agent, Neighborhood, Population, Position, step
from grrsim.rib import (
    DEAD,
    DISTAL,
    PROXIMAL,
    UNDETERMINED,
    Genotype,
    default_rib_params,
    hh_concentration,
    proximal_area_fraction,
    rib_params,
    uniform_rib_init,
)
from grrsim.rng import ConstantStream, RandomStream

# frozen by hand from a = clamp(decay_length * ln(10**shh / threshold) / width, 0, 1)
# with the packaged defaults width=40, decay_length=8, threshold=0.3
SWEEP_AREA_FRACTIONS = {
    -0.4: 0.05658775342566354,
    -0.2: 0.14869115714542538,
    0.0: 0.24079456086518722,
    0.2: 0.33289796458494905,
    0.4: 0.4250013683047109,
    0.6: 0.5171047720244727,
    0.8: 0.6092081757442345,
}


def undetermined_at(x, y):
    return Agent(UNDETERMINED, Position(x, y), Neighborhood(math.floor(x), math.floor(y)))


# ------------------------------------------------------------------ parameters

def test_packaged_defaults():
    p = default_rib_params()
    assert (p.width, p.height) == (40, 20)
    assert p.decay_length == 8.0
    assert p.commit_threshold == 0.3
    assert p.commit_rate == 0.05
    assert (p.div_undet, p.die_undet) == (0.04, 0.02)
    assert (p.div_comm, p.die_comm) == (0.01, 0.005)
    assert p.shh_log_intensity == 0.0


@pytest.mark.parametrize(
    "overrides",
    [
        {"width": 0},
        {"decay_length": 0.0},
        {"commit_threshold": 0.0},
        {"commit_rate": 1.5},
        {"die_undet": -0.1},
        {"shh_log_intensity": float("nan")},
    ],
)
def test_rib_params_validation(overrides):
    with pytest.raises(ValueError):
        rib_params(**overrides)


def test_genotype_presets():
    normal = rib_params(Genotype.NORMAL)
    apaf1 = rib_params(Genotype.APAF1_KO)
    shh = rib_params(Genotype.SHH_KO)
    dko = rib_params(Genotype.APAF1_SHH_DKO)
    assert (apaf1.die_undet, apaf1.die_comm) == (0.0, 0.0)
    assert apaf1.div_undet == normal.div_undet  # proliferation untouched
    assert shh.shh_log_intensity == -math.inf
    assert (shh.die_undet, shh.die_comm) == (normal.die_undet, normal.die_comm)
    assert (dko.die_undet, dko.die_comm) == (0.0, 0.0)
    assert dko.shh_log_intensity == -math.inf


def test_overrides_win_over_genotype_preset():
    p = rib_params(Genotype.APAF1_KO, die_undet=0.5)
    assert p.die_undet == 0.5
    assert p.die_comm == 0.0


def test_unknown_override_rejected():
    with pytest.raises(ValueError):
        rib_params(Genotype.NORMAL, lifespan=3)


def test_genotype_string_values():
    assert Genotype("normal") is Genotype.NORMAL
    assert Genotype("apaf1ko") is Genotype.APAF1_KO
    assert Genotype("shhko") is Genotype.SHH_KO
    assert Genotype("dko") is Genotype.APAF1_SHH_DKO


# ---------------------------------------------------------------- the gradient

def test_concentration_at_proximal_edge_is_the_amplitude():
    p = rib_params(shh_log_intensity=0.4)
    assert hh_concentration(0.0, p) == 10.0**0.4


def test_concentration_decays_by_e_per_decay_length():
    p = rib_params()
    assert hh_concentration(8.0, p) == pytest.approx(math.exp(-1.0), rel=1e-15)
    xs = np.array([0.0, 8.0, 16.0])
    vals = hh_concentration(xs, p)
    assert vals.shape == (3,)
    assert np.all(np.diff(vals) < 0)


def test_zero_amplitude_everywhere_zero():
    p = rib_params(Genotype.SHH_KO)
    assert hh_concentration(0.0, p) == 0.0
    assert hh_concentration(25.0, p) == 0.0


def test_concentration_equals_threshold_at_the_frontier():
    p = rib_params(shh_log_intensity=0.3)
    x_star = p.decay_length * math.log(10.0**0.3 / p.commit_threshold)
    assert hh_concentration(x_star, p) == pytest.approx(p.commit_threshold, rel=1e-12)


@pytest.mark.parametrize("shh,expected", sorted(SWEEP_AREA_FRACTIONS.items()))
def test_proximal_area_fraction_frozen_values(shh, expected):
    assert proximal_area_fraction(rib_params(shh_log_intensity=shh)) == pytest.approx(
        expected, abs=1e-9
    )


def test_proximal_area_fraction_clamps():
    assert proximal_area_fraction(rib_params(Genotype.SHH_KO)) == 0.0
    assert proximal_area_fraction(rib_params(shh_log_intensity=6.0)) == 1.0
    # amplitude below threshold everywhere: no proximal region
    assert proximal_area_fraction(rib_params(shh_log_intensity=-2.0)) == 0.0


# ------------------------------------------------------------------ the rules

def test_commit_fate_follows_position_against_frontier():
    # force commitment on the first step and read the fate off the state
    overrides = {"commit_rate": 1.0, "die_undet": 0.0, "div_undet": 0.0}
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    # frontier for s=1: 8*ln(1/0.3) = 9.6318...
    inside = undetermined_at(9.63, 10.0)
    outside = undetermined_at(9.64, 10.0)
    pop = Population.from_agents([inside, outside])
    after = step(pop, model, RandomStream(17))
    assert after.states[0] == PROXIMAL
    assert after.states[1] == DISTAL
    # commitment happens in place
    assert np.array_equal(after.xy, pop.xy)


def test_agents_committing_this_step_do_not_divide():
    overrides = {"commit_rate": 1.0, "die_undet": 0.0, "div_undet": 1.0}
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    pop = Population.from_agents([undetermined_at(5.0 + i, 5.0) for i in range(6)])
    after = step(pop, model, RandomStream(3))
    assert len(after) == 6  # no births: commitment preempts division
    assert set(int(s) for s in after.states) <= {PROXIMAL, DISTAL}


def test_committed_agents_are_stationary_and_irreversible():
    overrides = {"die_comm": 0.0, "div_comm": 0.0}
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    rows = [
        Agent(PROXIMAL, Position(2.5, 2.5), Neighborhood(2, 2)),
        Agent(DISTAL, Position(30.5, 7.5), Neighborhood(30, 7)),
    ]
    pop = Population.from_agents(rows)
    for seed in range(10):
        after = step(pop, model, RandomStream(seed))
        assert np.array_equal(after.states, pop.states)
        assert np.array_equal(after.xy, pop.xy)
        assert len(after) == 2


def test_committed_death_is_in_place_and_absorbing():
    model = g.build_rib_model(Genotype.NORMAL, {"die_comm": 1.0})
    pop = Population.from_agents([Agent(PROXIMAL, Position(2.5, 2.5), Neighborhood(2, 2))])
    after = step(pop, model, RandomStream(0))
    assert after.states[0] == DEAD
    assert tuple(after.xy[0]) == (2.5, 2.5)
    again = step(after, model, RandomStream(1))
    assert again.states[0] == DEAD and len(again) == 1


def test_committed_division_spawns_same_state_next_door():
    overrides = {"die_comm": 0.0, "div_comm": 1.0}
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    rows = [
        Agent(PROXIMAL, Position(2.5, 2.5), Neighborhood(2, 2)),
        Agent(DISTAL, Position(30.5, 7.5), Neighborhood(30, 7)),
    ]
    pop = Population.from_agents(rows)
    after = step(pop, model, RandomStream(21))
    assert len(after) == 4
    assert after.states[2] == PROXIMAL and after.states[3] == DISTAL
    for child, parent in ((2, 0), (3, 1)):
        d = math.hypot(after.xy[child, 0] - pop.xy[parent, 0], after.xy[child, 1] - pop.xy[parent, 1])
        assert d == 0.0 or abs(d - 1.0) < 1e-12


def test_undetermined_offspring_leave_from_pre_move_position():
    overrides = {"commit_rate": 0.0, "die_undet": 0.0, "div_undet": 1.0}
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    pop = Population.from_agents([undetermined_at(20.0, 10.0)])
    value = 0.2
    theta = 2.0 * np.pi * value
    after = step(pop, model, ConstantStream(value))
    assert len(after) == 2
    assert after.states[1] == UNDETERMINED
    assert after.xy[1, 0] == 20.0 + math.cos(theta)
    assert after.xy[1, 1] == 10.0 + math.sin(theta)
    # the parent also moved one unit, to the same heading
    assert after.xy[0, 0] == 20.0 + math.cos(theta)


def test_undetermined_survivors_move_at_most_one_unit():
    model = g.build_rib_model(Genotype.NORMAL)
    pop = uniform_rib_init(300, model, RandomStream(5))
    after = step(pop, model, RandomStream(5))
    moved = after.states[: len(pop)] == UNDETERMINED
    d = np.hypot(
        after.xy[: len(pop)][moved, 0] - pop.xy[moved, 0],
        after.xy[: len(pop)][moved, 1] - pop.xy[moved, 1],
    )
    assert np.all((d < 1.0 + 1e-12))


def test_shh_ko_never_produces_proximal_cells():
    model = g.build_rib_model(Genotype.SHH_KO)
    pop = uniform_rib_init(400, model, RandomStream(1729))
    stream = RandomStream(1729)
    for _ in range(30):
        pop = step(pop, model, stream)
        assert int(np.sum(pop.states == PROXIMAL)) == 0


def test_apaf1_ko_population_never_shrinks():
    model = g.build_rib_model(Genotype.APAF1_KO)
    pop = uniform_rib_init(300, model, RandomStream(4))
    stream = RandomStream(4)
    live = lambda p: int(np.sum(p.states != DEAD))
    previous = live(pop)
    for _ in range(25):
        pop = step(pop, model, stream)
        assert live(pop) >= previous
        previous = live(pop)


def test_all_rates_zero_freezes_the_committed_and_kills_nobody():
    overrides = {
        "commit_rate": 0.0,
        "die_undet": 0.0,
        "div_undet": 0.0,
        "die_comm": 0.0,
        "div_comm": 0.0,
    }
    model = g.build_rib_model(Genotype.NORMAL, overrides)
    pop = uniform_rib_init(100, model, RandomStream(9))
    after = step(pop, model, RandomStream(9))
    # everyone stays undetermined; only positions change
    assert np.array_equal(after.states, pop.states)
    assert len(after) == 100
