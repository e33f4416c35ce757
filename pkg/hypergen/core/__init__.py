from .adam import Adam, AdamState, adam_step, adam_update, sgd_update
from .gradcheck import finite_diff_grad, relative_error
from .losses import mse_loss, softmax_cross_entropy
from .mlp import (MlpParams, init_mlp, layer_dims, linear, mlp_backward,
                  mlp_forward, mlp_forward_cached)
from .tensor import DTYPE, check_finite, numel
