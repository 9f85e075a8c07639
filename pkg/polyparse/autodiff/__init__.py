"""
Autodiff Package - computation graph, recurrent composites and SGD
"""

from .graph import (
    Node,
    Parameter,
    add,
    affine,
    backward,
    concat,
    constant,
    lookup,
    masked_log_softmax,
    mul,
    rectify,
    scale,
    sigmoid,
    slice_,
    softmax,
    softmax_cross_entropy,
    sum_scalars,
    tanh,
    zeros,
)
from .params import ParameterStore, SGDTrainer, SGDUpdate, glorot_init, sgd_update
from .recurrent import BiLSTMParams, LSTMParams, StackLSTM, bilstm, initial_state, lstm_step, run_lstm
from .gradcheck import GradCheckResult, check_gradients, relative_error

__all__ = [
    "Node",
    "Parameter",
    "add",
    "affine",
    "backward",
    "concat",
    "constant",
    "lookup",
    "masked_log_softmax",
    "mul",
    "rectify",
    "scale",
    "sigmoid",
    "slice_",
    "softmax",
    "softmax_cross_entropy",
    "sum_scalars",
    "tanh",
    "zeros",
    "ParameterStore",
    "SGDTrainer",
    "SGDUpdate",
    "glorot_init",
    "sgd_update",
    "BiLSTMParams",
    "LSTMParams",
    "StackLSTM",
    "bilstm",
    "initial_state",
    "lstm_step",
    "run_lstm",
    "GradCheckResult",
    "check_gradients",
    "relative_error",
]
