"""Minimal reverse-mode automatic differentiation over numpy float64 arrays.

Just enough machinery for this model family: elementwise arithmetic with
broadcasting, affine maps, sigmoid/tanh, row-wise softmax, concatenation
and mean reduction.  Graphs are rebuilt on every forward pass; leaves keep
their accumulated gradient until reset.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("data", "grad", "parents", "_backward")

    def __init__(self, data, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape

    def accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        if self.data.size != 1:
            raise ValueError("backward() is only defined for scalar outputs")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = Tensor(a.data + b.data, parents=(a, b))

    def backward(grad):
        a.accumulate(_unbroadcast(grad, a.data.shape))
        b.accumulate(_unbroadcast(grad, b.data.shape))

    out._backward = backward
    return out


def sub(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = Tensor(a.data - b.data, parents=(a, b))

    def backward(grad):
        a.accumulate(_unbroadcast(grad, a.data.shape))
        b.accumulate(_unbroadcast(-grad, b.data.shape))

    out._backward = backward
    return out


def mul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = Tensor(a.data * b.data, parents=(a, b))

    def backward(grad):
        a.accumulate(_unbroadcast(grad * b.data, a.data.shape))
        b.accumulate(_unbroadcast(grad * a.data, b.data.shape))

    out._backward = backward
    return out


def scale(a, c: float) -> Tensor:
    a = _wrap(a)
    out = Tensor(a.data * c, parents=(a,))

    def backward(grad):
        a.accumulate(grad * c)

    out._backward = backward
    return out


def linear(x, w, b=None) -> Tensor:
    """x @ w.T (+ b), with w laid out (out, in) and x (batch, in)."""
    x, w = _wrap(x), _wrap(w)
    data = x.data @ w.data.T
    parents = [x, w]
    if b is not None:
        b = _wrap(b)
        data = data + b.data
        parents.append(b)
    out = Tensor(data, parents=tuple(parents))

    def backward(grad):
        x.accumulate(grad @ w.data)
        w.accumulate(grad.T @ x.data)
        if b is not None:
            b.accumulate(_unbroadcast(grad, b.data.shape))

    out._backward = backward
    return out


def sigmoid(a) -> Tensor:
    a = _wrap(a)
    with np.errstate(over="ignore"):
        value = np.where(
            a.data >= 0, 1.0 / (1.0 + np.exp(-a.data)), np.exp(a.data) / (1.0 + np.exp(a.data))
        )
    out = Tensor(value, parents=(a,))

    def backward(grad):
        a.accumulate(grad * value * (1.0 - value))

    out._backward = backward
    return out


def tanh(a) -> Tensor:
    a = _wrap(a)
    value = np.tanh(a.data)
    out = Tensor(value, parents=(a,))

    def backward(grad):
        a.accumulate(grad * (1.0 - value * value))

    out._backward = backward
    return out


def softmax(a) -> Tensor:
    """Row-wise softmax along the last axis."""
    a = _wrap(a)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    value = exp / exp.sum(axis=-1, keepdims=True)
    out = Tensor(value, parents=(a,))

    def backward(grad):
        dot = (grad * value).sum(axis=-1, keepdims=True)
        a.accumulate(value * (grad - dot))

    out._backward = backward
    return out


def concat(tensors, axis: int = 1) -> Tensor:
    tensors = [_wrap(t) for t in tensors]
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis), parents=tuple(tensors))
    sizes = [t.data.shape[axis] for t in tensors]

    def backward(grad):
        offset = 0
        for t, size in zip(tensors, sizes):
            index = [slice(None)] * grad.ndim
            index[axis] = slice(offset, offset + size)
            t.accumulate(grad[tuple(index)])
            offset += size

    out._backward = backward
    return out


def mean(a) -> Tensor:
    a = _wrap(a)
    out = Tensor(np.asarray(a.data.mean()), parents=(a,))

    def backward(grad):
        a.accumulate(np.full_like(a.data, float(grad) / a.data.size))

    out._backward = backward
    return out
