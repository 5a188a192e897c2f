"""Deep deterministic policy gradient controller for the threshold vector."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

from ..env import Action
from .nets import Mlp, soft_update
from .noise import OuNoise
from .optim import make_optimizer
from .replay import PrioritizedReplay, Transition

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class AgentConfig:
    hidden: tuple = (400, 300, 200)
    lr_actor: float = 1e-4
    lr_critic: float = 1e-3
    gamma: float = 0.99
    tau: float = 0.005
    batch_size: int = 128
    buffer_size: int = 1_000_000
    optimizer: str = "sgd"
    grad_clip: float = 1.0
    ou_theta: float = 0.15
    ou_sigma: float = 0.2
    ou_sigma_decay: float = 0.995
    ou_sigma_min: float = 0.01
    per_alpha: float = 0.6
    per_beta0: float = 0.4
    per_beta1: float = 1.0
    per_eps: float = 1e-3
    epsilon_greedy: bool = False
    epsilon0: float = 0.8
    epsilon_decay: float = 0.99
    alpha_min: float = 0.001
    alpha_max: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if not self.alpha_min < self.alpha_max:
            raise ValueError("alpha_min must be below alpha_max")

    @classmethod
    def from_experiment(cls, cfg) -> "AgentConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{n: getattr(cfg, n) for n in names})


@dataclass
class EpisodeLog:
    episode: int
    ret: float
    critic_loss: float
    mean_alpha: float
    sigma_ou: float


class DdpgAgent:
    """Actor, critic, their target copies, replay memory and exploration noise."""

    def __init__(self, state_width: int, k: int, config: AgentConfig | None = None, seed: int = 0):
        self.config = cfg = config or AgentConfig()
        self.state_width, self.k, self.seed = state_width, k, seed
        init_rng = np.random.default_rng([seed, 11])
        hidden = list(cfg.hidden)
        self.actor = Mlp([state_width, *hidden, k], "sigmoid", rng=init_rng, final_scale=3e-3)
        self.critic = Mlp([state_width, *hidden, 1], "identity", inject_width=k, inject_at=1, rng=init_rng)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.actor_opt = make_optimizer(cfg.optimizer, self.actor.params, cfg.lr_actor, cfg.grad_clip)
        self.critic_opt = make_optimizer(cfg.optimizer, self.critic.params, cfg.lr_critic, cfg.grad_clip)
        self.buffer = PrioritizedReplay(cfg.buffer_size, cfg.per_alpha, cfg.per_eps)
        self.rng = np.random.default_rng([seed, 12])
        self.noise = OuNoise(k, cfg.ou_theta, cfg.ou_sigma, 0.0, np.random.default_rng([seed, 13]))
        self.epsilon = cfg.epsilon0 if cfg.epsilon_greedy else 0.0
        self.updates = 0

    # acting -------------------------------------------------------------------
    @property
    def span(self) -> float:
        return self.config.alpha_max - self.config.alpha_min

    def policy(self, states) -> np.ndarray:
        return self.config.alpha_min + self.span * self.actor.forward(states)

    def select_action(self, state, explore: bool = False) -> Action:
        cfg = self.config
        alphas = self.policy(np.asarray(state, dtype=float))
        if explore:
            if self.epsilon > 0 and self.rng.random() < self.epsilon:
                alphas = self.rng.uniform(cfg.alpha_min, cfg.alpha_max, self.k)
            else:
                alphas = alphas + self.noise.step()
        return Action(alphas, cfg.alpha_min, cfg.alpha_max)

    def remember(self, state, action, reward, next_state) -> None:
        self.buffer.store(Transition(np.asarray(state, dtype=float), np.asarray(action, dtype=float),
                                     float(reward), np.asarray(next_state, dtype=float)))

    # learning -----------------------------------------------------------------
    @staticmethod
    def _stack(batch):
        return (np.stack([t.state for t in batch]), np.stack([t.action for t in batch]),
                np.array([t.reward for t in batch]), np.stack([t.next_state for t in batch]))

    def critic_update(self, batch, weights=None):
        """One weighted mean-squared Bellman error step; returns (loss, td_errors)."""
        s, a, r, s2 = self._stack(batch)
        n = len(r)
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        a2 = self.config.alpha_min + self.span * self.actor_target.forward(s2)
        y = r + self.config.gamma * self.critic_target.forward(s2, a2)[:, 0]
        q = self.critic.forward(s, a)[:, 0]
        td = y - q
        loss = float(np.mean(w * td ** 2))
        grads, _, _ = self.critic.backward((-2.0 * w * td / n)[:, None])
        self.critic_opt.step(grads)
        return loss, td

    def actor_update(self, batch) -> float:
        """One ascent step on the mean critic value of the current policy."""
        s = np.stack([t.state for t in batch]) if not isinstance(batch, np.ndarray) else batch
        n = len(s)
        a = self.policy(s)
        q = self.critic.forward(s, a)[:, 0]
        _, _, dq_da = self.critic.backward(np.full((n, 1), 1.0 / n))
        # descend on -mean Q; the rescale to [alpha_min, alpha_max] scales by span
        self.actor.forward(s)
        grads, _, _ = self.actor.backward(-dq_da * self.span)
        self.actor_opt.step(grads)
        return float(q.mean())

    def soft_update(self) -> None:
        soft_update(self.actor_target, self.actor, self.config.tau)
        soft_update(self.critic_target, self.critic, self.config.tau)

    def learn(self, beta: float):
        batch, weights, idx = self.buffer.sample(self.config.batch_size, self.rng, beta)
        loss, td = self.critic_update(batch, weights)
        self.buffer.update_priorities(idx, td)
        self.actor_update(batch)
        self.soft_update()
        self.updates += 1
        return loss

    def end_episode(self) -> None:
        cfg = self.config
        self.noise.sigma = max(cfg.ou_sigma_min, self.noise.sigma * cfg.ou_sigma_decay)
        self.noise.reset()
        if self.epsilon > 0:
            self.epsilon *= cfg.epsilon_decay

    # persistence --------------------------------------------------------------
    def save(self, path) -> None:
        blob = {
            "version": CHECKPOINT_VERSION,
            "state_width": self.state_width,
            "k": self.k,
            "alpha_min": self.config.alpha_min,
            "alpha_max": self.config.alpha_max,
            "actor_sizes": self.actor.sizes,
            "critic_sizes": self.critic.sizes,
            "actor": [p.ravel().tolist() for p in self.actor.params],
            "critic": [p.ravel().tolist() for p in self.critic.params],
        }
        with open(path, "w") as fh:
            json.dump(blob, fh)

    @classmethod
    def load(cls, path, config: AgentConfig | None = None) -> "DdpgAgent":
        with open(path) as fh:
            blob = json.load(fh)
        if blob.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {blob.get('version')!r}")
        base = config or AgentConfig()
        cfg = AgentConfig(**{**{f.name: getattr(base, f.name) for f in fields(AgentConfig)},
                             "hidden": tuple(blob["actor_sizes"][1:-1]),
                             "alpha_min": blob["alpha_min"], "alpha_max": blob["alpha_max"]})
        agent = cls(blob["state_width"], blob["k"], cfg)
        for net, key in ((agent.actor, "actor"), (agent.critic, "critic")):
            for p, flat in zip(net.params, blob[key]):
                p[...] = np.asarray(flat, dtype=float).reshape(p.shape)
        agent.actor_target = agent.actor.copy()
        agent.critic_target = agent.critic.copy()
        return agent


def train(agent: DdpgAgent, env, e_max: int, t_max: int, seed: int | None = None, callback=None):
    """Run the interact/store/learn loop for ``e_max`` episodes of ``t_max`` steps.

    Learning starts once the buffer holds more than one batch.  The importance
    exponent anneals linearly over the planned number of steps.
    """
    cfg = agent.config
    base_seed = agent.seed if seed is None else seed
    total_steps = max(1, e_max * t_max)
    log: list[EpisodeLog] = []
    step_count = 0
    for episode in range(e_max):
        state = env.reset(seed=base_seed + episode)
        state = state if isinstance(state, np.ndarray) else env.observe()
        ret, losses, alphas = 0.0, [], []
        sigma = agent.noise.sigma
        for _ in range(t_max):
            action = agent.select_action(state, explore=True)
            _, reward, _, _ = env.step(action)
            next_state = env.observe()
            agent.remember(state, action.alphas, reward, next_state)
            ret += reward
            alphas.append(action.alphas.mean())
            step_count += 1
            if len(agent.buffer) > cfg.batch_size:
                beta = cfg.per_beta0 + (cfg.per_beta1 - cfg.per_beta0) * min(1.0, step_count / total_steps)
                losses.append(agent.learn(beta))
            state = next_state
        agent.end_episode()
        entry = EpisodeLog(episode, ret, float(np.mean(losses)) if losses else 0.0,
                           float(np.mean(alphas)), sigma)
        log.append(entry)
        if callback is not None:
            callback(entry)
    return log


def write_training_log(path, log, config_hash: str, seed: int) -> None:
    with open(path, "w") as fh:
        fh.write("episode,return,critic_loss,mean_alpha,sigma_ou,config_hash,seed\n")
        for e in log:
            fh.write(f"{e.episode},{e.ret:.10g},{e.critic_loss:.10g},{e.mean_alpha:.10g},"
                     f"{e.sigma_ou:.10g},{config_hash},{seed}\n")
