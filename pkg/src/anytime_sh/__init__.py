"""Sequential Halving, Anytime Sequential Halving and UCB1 for bandits and MCTS."""

__version__ = "0.1.0"
