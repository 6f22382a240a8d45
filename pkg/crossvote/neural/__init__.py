"""Q-network, replay buffer, Deep Q-learning trainer and checkpoints."""
from .mlp import Mlp, MlpGrads, forward, forward_batch, gradients, loss, optimizer_step
from .replay import ReplayBuffer, Transition, TransitionBatch
from .dqn import DQNTrainer, Hyperparams, TrainingResult, epsilon_at, td_targets, train_dqn
from .checkpoint import load_checkpoint, save_checkpoint
