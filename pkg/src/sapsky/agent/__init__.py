"""Threshold controller: networks, replay, noise and the DDPG learner."""
from .ddpg import AgentConfig, DdpgAgent, EpisodeLog, train, write_training_log
from .nets import Mlp, param_distance, soft_update
from .noise import OuNoise, ou_step
from .optim import SGD, Adam, make_optimizer
from .replay import PrioritizedReplay, SumTree, Transition

__all__ = ["AgentConfig", "DdpgAgent", "EpisodeLog", "train", "write_training_log", "Mlp",
           "param_distance", "soft_update", "OuNoise", "ou_step", "SGD", "Adam", "make_optimizer",
           "PrioritizedReplay", "SumTree", "Transition"]
