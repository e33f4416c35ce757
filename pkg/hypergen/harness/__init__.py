from .artifact import load_checkpoint, load_model, save_checkpoint, save_model
from .baselines import METHODS, BaselineResult, run_baseline
from .experiment import ExperimentReport, run_experiment, run_protocol
from .finetune import FinetuneSettings, finetune
from .init_study import InitStudy, plot_init_study, weight_init_study
from .metrics import accuracy, pearson, score, top_k_accuracy
from .report import write_report, write_study
