from .gradcheck import gradcheck, numerical_grad, relative_error
from .nn import Dense, GRUCell, GRUNet, Module, glorot_uniform, gru_cell
from .optim import Adam, AdamState, adam_step
from .tensor import (
    Tape,
    Tensor,
    abs_,
    add,
    as_tensor,
    backward,
    bce_with_logits,
    concat,
    exp,
    get_tape,
    log,
    matmul,
    mean,
    mse,
    mul,
    neg,
    no_grad,
    relu,
    reshape,
    sigmoid,
    slice_,
    sqrt,
    square,
    stack,
    sub,
    sum_,
    tanh,
)
