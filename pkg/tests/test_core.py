import dataclasses
import math
import random

import numpy as np
import pytest

import grrsim as g
from grrsim.core import (
    Agent,
    Environment,
    Neighborhood,
    Population,
    Position,
    count_by_state,
    generic_step,
    probe_production,
    probe_transition,
    production_rule,
    run_simulation,
    step,
    step_events,
    transition_rule,
    uniform_population,
    unit_step,
)
from grrsim.rng import ConstantStream, RandomStream

A_G = g.build_gol_model(g.GolParams(20, 2, 8, 2, 4))


def random_population(rng, env_w, n, p_alive=0.7, time=0):
    agents = []
    for _ in range(n):
        x, y = rng.uniform(0, env_w), rng.uniform(0, env_w)
        state = 1 if rng.random() < p_alive else 0
        agents.append(Agent(state, Position(x, y), Neighborhood(math.floor(x), math.floor(y))))
    return Population.from_agents(agents, time=time)


# ---------------------------------------------------------------- environment

@pytest.mark.parametrize("w,h", [(0, 5), (5, 0), (-1, 3)])
def test_environment_rejects_nonpositive_dims(w, h):
    with pytest.raises(ValueError):
        Environment(w, h)


def test_environment_half_open_membership():
    env = Environment(4, 3)
    assert env.contains(0.0, 0.0)
    assert env.contains(3.999999, 2.999999)
    assert not env.contains(4.0, 1.0)
    assert not env.contains(1.0, 3.0)
    assert not env.contains(-1e-12, 1.0)
    assert env.area == 12.0


def test_square_of_floors_coordinates():
    env = Environment(4, 4)
    assert env.square_of(2.7, 0.2) == Neighborhood(2, 0)
    assert env.square_of(0.0, 3.999) == Neighborhood(0, 3)


def test_neighborhood_contains_is_half_open():
    sq = Neighborhood(2, 1)
    assert sq.contains(Position(2.0, 1.0))
    assert sq.contains(Position(2.999, 1.999))
    assert not sq.contains(Position(3.0, 1.5))


def test_unit_step_moves_by_unit_vector():
    env = Environment(10, 10)
    p = unit_step(Position(5.0, 5.0), 0.0, env)
    assert (p.x, p.y) == (6.0, 5.0)
    theta = 1.2345
    q = unit_step(Position(5.0, 5.0), theta, env)
    assert (q.x, q.y) == (5.0 + math.cos(theta), 5.0 + math.sin(theta))


def test_unit_step_cancelled_at_boundary():
    env = Environment(10, 10)
    # exiting through the right edge: stay put
    assert unit_step(Position(9.5, 5.0), 0.0, env) == Position(9.5, 5.0)
    # exiting through the top edge (sin(pi/2) is exactly 1): stay put
    assert unit_step(Position(5.0, 9.5), math.pi / 2.0, env) == Position(5.0, 9.5)
    # the same headings away from the edge do move
    assert unit_step(Position(0.25, 5.0), 0.0, env) == Position(1.25, 5.0)


# ----------------------------------------------------------------- population

def test_population_round_trips_agents():
    rng = random.Random(7)
    pop = random_population(rng, 4, 9, time=3)
    assert len(pop) == 9
    assert pop.time == 3
    rebuilt = Population.from_agents(list(pop), time=3)
    assert np.array_equal(rebuilt.states, pop.states)
    assert np.array_equal(rebuilt.xy, pop.xy)
    assert np.array_equal(rebuilt.squares, pop.squares)


def test_population_contains_is_full_triple_match():
    a = Agent(1, Position(1.5, 1.5), Neighborhood(1, 1))
    twin = Agent(1, Position(1.5, 1.5), Neighborhood(1, 1))
    other_state = Agent(0, Position(1.5, 1.5), Neighborhood(1, 1))
    other_pos = Agent(1, Position(1.25, 1.5), Neighborhood(1, 1))
    pop = Population.from_agents([a, a])
    assert pop.contains(twin)
    assert not pop.contains(other_state)
    assert not pop.contains(other_pos)
    assert not Population.empty().contains(a)


def test_check_consistent_catches_bad_rows():
    env = Environment(4, 4)
    good = random_population(random.Random(1), 4, 5)
    good.check_consistent(env)
    bad_square = Population(
        states=good.states.copy(),
        xy=good.xy.copy(),
        squares=good.squares + 1,
        time=0,
    )
    with pytest.raises(AssertionError):
        bad_square.check_consistent(env)
    outside = Population(
        states=good.states.copy(),
        xy=good.xy + 100.0,
        squares=good.squares + 100,
        time=0,
    )
    with pytest.raises(AssertionError):
        outside.check_consistent(env)


def test_model_definition_validates_state_table():
    env = Environment(4, 4)
    with pytest.raises(ValueError):
        g.ModelDefinition(
            name="bad-ids",
            states=(g.StateId(0, "a"), g.StateId(2, "b")),
            environment=env,
            transition=A_G.transition,
            production=A_G.production,
            death_state=0,
        )
    with pytest.raises(ValueError):
        g.ModelDefinition(
            name="dup-labels",
            states=(g.StateId(0, "a"), g.StateId(1, "a")),
            environment=env,
            transition=A_G.transition,
            production=A_G.production,
            death_state=0,
        )


# ------------------------------------------------------------------ the rules

def test_dead_agents_are_inert_under_both_rules():
    corpse = Agent(0, Position(3.5, 3.5), Neighborhood(3, 3))
    pop = Population.from_agents([corpse])
    rng = RandomStream(3).agent(0, 0)
    assert transition_rule(corpse, pop, A_G, rng) == corpse
    assert production_rule(corpse, pop, A_G, rng) == []


def test_rules_ignore_agents_not_in_population():
    # a live agent that is not a member is returned unchanged and emits nothing
    outsider = Agent(1, Position(3.5, 3.5), Neighborhood(3, 3))
    pop = Population.empty()
    rng = RandomStream(3).agent(0, 0)
    assert transition_rule(outsider, pop, A_G, rng) == outsider
    assert production_rule(outsider, pop, A_G, rng) == []


def test_probe_rules_bypass_the_membership_guard():
    # same outsider, but probed: zero neighbors kills it under A_G
    outsider = Agent(1, Position(3.5, 3.5), Neighborhood(3, 3))
    pop = Population.empty()
    rng = RandomStream(3).agent(0, 0)
    probed = probe_transition(outsider, pop, A_G, rng)
    assert probed.state == g.gol.DEAD
    assert probed.position == outsider.position
    assert probe_production(outsider, pop, A_G, rng) == []


# ----------------------------------------------------------------- stepping

@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_batch_step_matches_generic_step(seed):
    rng = random.Random(seed)
    pop = random_population(rng, 20, 60, time=seed)
    stream = RandomStream(seed + 100)
    fast = step(pop, A_G, stream)
    slow = generic_step(pop, A_G, stream)
    assert np.array_equal(fast.states, slow.states)
    assert np.array_equal(fast.xy, slow.xy)
    assert np.array_equal(fast.squares, slow.squares)
    assert fast.time == slow.time == pop.time + 1


@pytest.mark.parametrize("seed", [10, 11])
def test_rib_batch_step_matches_generic_step(seed):
    model = g.build_rib_model(g.Genotype.NORMAL, {"width": 8, "height": 4})
    rng = random.Random(seed)
    agents = []
    for _ in range(50):
        x, y = rng.uniform(0, 8), rng.uniform(0, 4)
        state = rng.choice([0, 0, 1, 2, 3])
        agents.append(Agent(state, Position(x, y), Neighborhood(math.floor(x), math.floor(y))))
    pop = Population.from_agents(agents, time=seed)
    stream = RandomStream(seed)
    fast = step(pop, model, stream)
    slow = generic_step(pop, model, stream)
    assert np.array_equal(fast.states, slow.states)
    assert np.array_equal(fast.xy, slow.xy)


def test_step_output_rows_align_with_input():
    pop = random_population(random.Random(5), 20, 40)
    after = step(pop, A_G, RandomStream(5))
    assert len(after) >= len(pop)
    # dead input rows are copied through in place
    dead_rows = np.flatnonzero(pop.states == 0)
    assert np.array_equal(after.states[dead_rows], pop.states[dead_rows])
    assert np.array_equal(after.xy[dead_rows], pop.xy[dead_rows])
    # appended rows are newborn living agents
    assert np.all(after.states[len(pop):] == 1)


def test_step_prune_dead_drops_death_state_rows():
    pop = random_population(random.Random(8), 20, 40)
    after = step(pop, A_G, RandomStream(8), prune_dead=True)
    assert np.all(after.states != 0)


def test_step_on_empty_population_is_empty():
    after = step(Population.empty(time=4), A_G, RandomStream(0))
    assert len(after) == 0
    assert after.time == 5


def test_step_events_balance_the_books():
    pop = random_population(random.Random(9), 20, 120)
    stream = RandomStream(9)
    after = step(pop, A_G, stream)
    ev = step_events(pop, after, A_G)
    living_before = int(np.sum(pop.states == 1))
    assert ev.survivors + ev.deaths == living_before
    assert ev.births == len(after) - len(pop)
    assert int(count_by_state(after, 2)[1]) == ev.survivors + ev.births


def test_count_by_state_with_explicit_width():
    pop = random_population(random.Random(2), 4, 10)
    counts = count_by_state(pop, 5)
    assert counts.shape == (5,)
    assert counts.sum() == 10
    assert counts[2:].sum() == 0


def test_uniform_population_postconditions():
    pop = uniform_population(A_G, 500, 1, RandomStream(42))
    assert len(pop) == 500
    assert pop.time == 0
    assert np.all(pop.states == 1)
    assert np.all((pop.xy >= 0.0) & (pop.xy < 20.0))
    pop.check_consistent(A_G.environment)
    # same seed reproduces, different seed does not
    again = uniform_population(A_G, 500, 1, RandomStream(42))
    assert np.array_equal(pop.xy, again.xy)
    assert not np.array_equal(pop.xy, uniform_population(A_G, 500, 1, RandomStream(43)).xy)


def test_uniform_population_rejects_unknown_state():
    with pytest.raises(ValueError):
        uniform_population(A_G, 10, 7, RandomStream(0))


def test_run_simulation_yields_horizon_plus_one_snapshots():
    init = uniform_population(A_G, 50, 1, RandomStream(1))
    snaps = list(run_simulation(init, A_G, RandomStream(1), horizon=6))
    assert len(snaps) == 7
    assert [p.time for p in snaps] == list(range(7))
    assert snaps[0] is init


def test_once_extinct_always_extinct():
    # all-dead population: no rule may resurrect or spawn
    agents = [Agent(0, Position(1.5, 1.5), Neighborhood(1, 1))] * 6
    pop = Population.from_agents(agents)
    for t in range(5):
        pop = step(pop, A_G, RandomStream(77))
        assert np.all(pop.states == 0)
        assert len(pop) == 6


def test_constant_stream_step_is_fully_deterministic():
    pop = random_population(random.Random(3), 20, 30)
    a = step(pop, A_G, ConstantStream(0.0))
    b = step(pop, A_G, ConstantStream(0.0))
    assert np.array_equal(a.xy, b.xy) and np.array_equal(a.states, b.states)
