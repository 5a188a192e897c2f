import numpy as np
import pytest

from sapsky.agent import AgentConfig, DdpgAgent
from sapsky.config import desk_config
from sapsky.env import EdgeCloudEnv
from sapsky.policies import Policy, decide


def test_construction_errors():
    with pytest.raises(ValueError):
        Policy("greedy")
    with pytest.raises(ValueError):
        Policy("fixed_threshold")
    with pytest.raises(ValueError):
        Policy("fixed_threshold", fixed_alpha=1.5)
    with pytest.raises(ValueError):
        Policy("sa_psky")


def test_fixed_threshold_vector():
    a = decide(Policy("fixed_threshold", fixed_alpha=0.02), np.zeros(17), 5, 0.001, 0.9)
    assert a.alphas.tolist() == [0.02] * 5 and not a.raw


def test_no_filtering_flag():
    a = decide(Policy("no_filtering"), np.zeros(17), 5, 0.001, 0.9)
    assert a.raw and np.all(a.alphas == 0.001)


def test_constant_actor():
    agent = DdpgAgent(17, 5, AgentConfig(hidden=(4, 4, 4)), seed=0)
    for p in agent.actor.params:
        p[...] = 0.0
    pol = Policy("sa_psky", actor=agent)
    rng = np.random.default_rng(0)
    acts = {tuple(decide(pol, rng.normal(size=17), 5, 0.001, 0.9).alphas) for _ in range(5)}
    assert len(acts) == 1
    assert np.allclose(next(iter(acts)), 0.001 + 0.899 * 0.5)


def test_actor_from_checkpoint(tmp_path):
    agent = DdpgAgent(17, 5, AgentConfig(hidden=(4, 4, 4)), seed=1)
    agent.save(tmp_path / "a.json")
    pol = Policy("sa_psky", actor=str(tmp_path / "a.json"))
    s = np.linspace(0, 1, 17)
    assert np.array_equal(decide(pol, s, 5, 0.001, 0.9).alphas, agent.select_action(s).alphas)


def test_policies_see_identical_arrivals():
    cfg = desk_config(total_objects=600, k_nodes=3, w_max=60, c_max=1.0, l_max=1.0)
    seqs = []
    for pol in (Policy("no_filtering"), Policy("fixed_threshold", fixed_alpha=0.02)):
        env = EdgeCloudEnv(cfg, profile=False)
        env.reset(3, warmup_steps=0)
        env.set_budget(600)
        ids = []
        while not env.exhausted:
            env.apply(decide(pol, env.observe(), 3, cfg.alpha_min, cfg.alpha_max))
            ids.append([[(o.object_id, o.values.tobytes()) for o in n.window] for n in env.nodes])
        seqs.append(ids)
    assert seqs[0] == seqs[1]
