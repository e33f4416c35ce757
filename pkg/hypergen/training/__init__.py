from .inner import inner_step
from .loss import task_loss
from .pairs import TaskRequirementPair
from .schedule import balance_tasks, batch_count, plan_batches
from .trainer import Checkpoint, evaluate, hyper_backward, train
