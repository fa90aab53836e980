"""Reverse-mode differentiation over dense numpy arrays.

A Tape records every operation whose inputs depend on a tracked leaf. The
recording order is a topological order, so backward simply walks it in
reverse. Each sentence gets its own tape; tapes never share nodes, which is
what lets several examples be differentiated independently before their
gradients are folded into the parameter store.
"""
import numpy as np

from ..exceptions import DataError, DimensionError, NonFiniteError


class Tensor:
    __slots__ = ('value', 'grad', 'tape', 'parents', 'backward_fn', 'name')

    def __init__(self, value, tape=None, parents=(), backward_fn=None, name=None):
        self.value = value
        self.grad = None
        self.tape = tape
        self.parents = parents
        self.backward_fn = backward_fn
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    @property
    def size(self):
        return self.value.size

    @property
    def tracked(self):
        return self.tape is not None

    def numpy(self):
        return self.value

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label})"


class Tape:
    """
    Records operations for one forward pass

    Args:
        store (ParameterStore, optional): Source of named parameter slots
        record (bool): False gives a read-only evaluation that builds no graph
        dtype: Floating type for constants created through this tape
    """

    def __init__(self, store=None, record=True, dtype=None):
        self.store = store
        self.record = record
        if dtype is None:
            dtype = store.dtype if store is not None else np.float64
        self.dtype = np.dtype(dtype)
        self.nodes = []
        self._leaves = {}

    def param(self, name):
        """Leaf tensor bound to a parameter slot; one leaf per slot per tape"""
        leaf = self._leaves.get(name)
        if leaf is None:
            leaf = Tensor(self.store.value(name), tape=self if self.record else None, name=name)
            self._leaves[name] = leaf
        return leaf

    def leaf(self, value, name=None):
        """Tracked leaf that does not live in the parameter store"""
        return Tensor(np.asarray(value, dtype=self.dtype), tape=self if self.record else None, name=name)

    def constant(self, value):
        return Tensor(np.asarray(value, dtype=self.dtype))

    def zeros(self, *shape):
        return Tensor(np.zeros(shape, dtype=self.dtype))

    def node(self, value, parents, backward_fn):
        if not self.record:
            return Tensor(value)
        out = Tensor(value, self, parents, backward_fn)
        self.nodes.append(out)
        return out

    def backward(self, loss):
        """
        Propagate d(loss)/d(node) to every recorded node and leaf

        Raises:
            DataError: If loss is not a single value
            NonFiniteError: If loss is nan or infinite
        """
        if loss.size != 1:
            raise DataError(f"backward needs a scalar loss, got shape {loss.shape}")
        if not np.all(np.isfinite(loss.value)):
            raise NonFiniteError("loss is not finite")
        loss.grad = np.ones_like(loss.value)
        for node in reversed(self.nodes):
            if node.grad is None:
                continue
            grads = node.backward_fn(node.grad)
            for parent, grad in zip(node.parents, grads):
                if grad is None or parent.tape is None:
                    continue
                parent.grad = grad if parent.grad is None else parent.grad + grad

    def parameter_grads(self):
        return {name: leaf.grad for name, leaf in self._leaves.items() if leaf.grad is not None}

    def accumulate(self):
        """Add this tape's parameter gradients into the store"""
        for name, grad in self.parameter_grads().items():
            self.store.accumulate(name, grad)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))


def _make(value, parents, backward_fn):
    for parent in parents:
        if parent.tape is not None:
            return parent.tape.node(value, parents, backward_fn)
    return Tensor(value)


def stable_softmax(x):
    if x.size == 0:
        raise DimensionError('softmax', x.shape, (1,))
    shifted = x - np.max(x)
    e = np.exp(shifted)
    return e / np.sum(e)


def stable_log_softmax(x, mask=None):
    if x.size == 0:
        raise DimensionError('log_softmax', x.shape, (1,))
    if mask is None:
        shifted = x - np.max(x)
        return shifted - np.log(np.sum(np.exp(shifted)))
    if not np.any(mask):
        raise DataError("log_softmax over an empty mask")
    out = np.full_like(x, -np.inf)
    legal = x[mask]
    shifted = legal - np.max(legal)
    out[mask] = shifted - np.log(np.sum(np.exp(shifted)))
    return out


def _check_matvec(op, W, x):
    if W.value.ndim != 2 or x.value.ndim != 1 or W.shape[1] != x.shape[0]:
        raise DimensionError(op, W.shape, x.shape)


def affine(W, x, b):
    """W·x + b"""
    _check_matvec('affine', W, x)
    if b.shape != (W.shape[0],):
        raise DimensionError('affine', W.shape, b.shape)
    w, xv = W.value, x.value

    def backward(g):
        return np.outer(g, xv), w.T @ g, g

    return _make(w @ xv + b.value, (W, x, b), backward)


def matvec(W, x):
    _check_matvec('matvec', W, x)
    w, xv = W.value, x.value

    def backward(g):
        return np.outer(g, xv), w.T @ g

    return _make(w @ xv, (W, x), backward)


def tmatvec(W, x):
    """Wᵀ·x"""
    if W.value.ndim != 2 or x.value.ndim != 1 or W.shape[0] != x.shape[0]:
        raise DimensionError('tmatvec', W.shape, x.shape)
    w, xv = W.value, x.value

    def backward(g):
        return np.outer(xv, g), w @ g

    return _make(w.T @ xv, (W, x), backward)


def add(a, b):
    if a.shape != b.shape:
        raise DimensionError('add', a.shape, b.shape)
    return _make(a.value + b.value, (a, b), lambda g: (g, g))


def add_n(terms):
    """Sum of equally shaped tensors, accumulated left to right"""
    if not terms:
        raise DataError("add_n of an empty list")
    total = terms[0].value
    for term in terms[1:]:
        if term.shape != terms[0].shape:
            raise DimensionError('add_n', terms[0].shape, term.shape)
        total = total + term.value
    return _make(total, tuple(terms), lambda g: (g,) * len(terms))


def neg(a):
    return _make(-a.value, (a,), lambda g: (-g,))


def mul(a, b):
    if a.shape != b.shape:
        raise DimensionError('mul', a.shape, b.shape)
    av, bv = a.value, b.value
    return _make(av * bv, (a, b), lambda g: (g * bv, g * av))


def tanh(a):
    y = np.tanh(a.value)
    return _make(y, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a):
    y = 0.5 * (1.0 + np.tanh(0.5 * a.value))
    return _make(y, (a,), lambda g: (g * y * (1.0 - y),))


def concat(parts):
    parts = tuple(parts)
    for part in parts:
        if part.value.ndim != 1:
            raise DimensionError('concat', parts[0].shape, part.shape)
    sizes = [part.shape[0] for part in parts]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(g[bounds[i]:bounds[i + 1]] for i in range(len(parts)))

    return _make(np.concatenate([part.value for part in parts]), parts, backward)


def slice_(a, start, stop):
    n = a.shape[0]

    def backward(g):
        full = np.zeros(n, dtype=g.dtype)
        full[start:stop] = g
        return (full,)

    return _make(a.value[start:stop], (a,), backward)


def stack_rows(rows):
    """Matrix whose i-th row is rows[i]"""
    rows = tuple(rows)
    if not rows:
        raise DataError("stack_rows of an empty list")
    for row in rows:
        if row.shape != rows[0].shape:
            raise DimensionError('stack_rows', rows[0].shape, row.shape)
    return _make(np.stack([row.value for row in rows]), rows, lambda g: tuple(g))


def lookup(E, index):
    """Row `index` of an embedding matrix"""
    if not 0 <= index < E.shape[0]:
        raise DimensionError('lookup', E.shape, (index,))
    rows = E.shape

    def backward(g):
        full = np.zeros(rows, dtype=g.dtype)
        full[index] = g
        return (full,)

    return _make(E.value[index].copy(), (E,), backward)


def softmax(logits):
    """Probability vector; outputs sum to 1 and are shift invariant"""
    y = stable_softmax(logits.value)

    def backward(g):
        return (y * (g - np.dot(g, y)),)

    return _make(y, (logits,), backward)


def log_softmax(logits, mask=None):
    """
    Log-probabilities, optionally restricted to the entries where mask is True

    Masked-out entries come back as -inf and receive zero gradient.
    """
    y = stable_log_softmax(logits.value, mask)
    p = np.exp(y)

    def backward(g):
        if mask is None:
            return (g - p * np.sum(g),)
        gm = np.where(mask, g, 0.0)
        return (np.where(mask, gm - p * np.sum(gm), 0.0),)

    return _make(y, (logits,), backward)


def pick(a, index):
    """Scalar a[index]"""
    n = a.shape[0]

    def backward(g):
        full = np.zeros(n, dtype=g.dtype)
        full[index] = g
        return (full,)

    return _make(np.asarray(a.value[index]), (a,), backward)


def lstm_cell(z, c):
    """
    Gate nonlinearities of a standard LSTM, fused into one node

    Args:
        z: Pre-activations [i; f; o; g], each block of size d
        c: Previous cell, size d

    Returns:
        Tensor: [h'; c'] with c' = f*c + i*g and h' = o*tanh(c')
    """
    d = c.shape[0]
    if z.shape != (4 * d,):
        raise DimensionError('lstm_cell', z.shape, c.shape)
    zv, cv = z.value, c.value
    i = 0.5 * (1.0 + np.tanh(0.5 * zv[:d]))
    f = 0.5 * (1.0 + np.tanh(0.5 * zv[d:2 * d]))
    o = 0.5 * (1.0 + np.tanh(0.5 * zv[2 * d:3 * d]))
    u = np.tanh(zv[3 * d:])
    c_new = f * cv + i * u
    t = np.tanh(c_new)
    h_new = o * t

    def backward(g):
        gh, gc = g[:d], g[d:]
        dc = gc + gh * o * (1.0 - t * t)
        dz = np.concatenate([
            dc * u * i * (1.0 - i),
            dc * cv * f * (1.0 - f),
            gh * t * o * (1.0 - o),
            dc * i * (1.0 - u * u),
        ])
        return dz, dc * f

    return _make(np.concatenate([h_new, c_new]), (z, c), backward)
