"""Exact ReLU-network form of a tropical rational function.

Two scalar networks ``nu`` and ``mu`` of equal depth are merged into one
computing ``max(nu, mu)`` through the identity

    max(a, b) = relu(a - b) + relu(b) - relu(-b)

by stacking them side by side and replacing their output layers with a
three-unit ReLU layer followed by the contraction ``[1, 1, -1]``.
Monomials are affine networks; each polynomial is a balanced tree of such
merges and the final layer subtracts denominator from numerator.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from .poly import as_points

RELU = "relu"
NONE = "none"

_SPLIT = np.array([[1.0, -1.0], [0.0, 1.0], [0.0, -1.0]])
_MERGE = np.array([[1.0, 1.0, -1.0]])


@dataclass
class Layer:
    weights: np.ndarray
    bias: np.ndarray
    activation: str = RELU

    def __post_init__(self):
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        if self.bias.shape[0] != self.weights.shape[0]:
            raise ValueError("bias length does not match weight rows")
        if self.activation not in (RELU, NONE):
            raise ValueError(f"unknown activation {self.activation!r}")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("network parameters must be finite")


@dataclass
class ReluNetwork:
    input_dim: int
    layers: list = field(default_factory=list)
    input_scale: float = 1.0

    def __post_init__(self):
        width = self.input_dim
        for i, layer in enumerate(self.layers):
            if layer.weights.shape[1] != width:
                raise ValueError(f"layer {i} expects {layer.weights.shape[1]} inputs, got {width}")
            width = layer.weights.shape[0]
        if self.layers:
            if self.layers[-1].activation != NONE:
                raise ValueError("final layer must be linear")
            if width != 1:
                raise ValueError("network output must be scalar")

    @property
    def depth(self):
        return len(self.layers)

    @property
    def hidden_widths(self):
        return [layer.weights.shape[0] for layer in self.layers[:-1]]

    def __call__(self, x):
        return relu_forward(self, x)

    def to_dict(self):
        return {
            "input_dim": self.input_dim,
            "input_scale": self.input_scale,
            "layers": [
                {"weights": layer.weights.tolist(), "bias": layer.bias.tolist(),
                 "activation": layer.activation}
                for layer in self.layers
            ],
        }

    @classmethod
    def from_dict(cls, d):
        layers = [Layer(np.array(l["weights"], dtype=np.float64).reshape(len(l["bias"]), -1),
                        l["bias"], l["activation"]) for l in d["layers"]]
        return cls(int(d["input_dim"]), layers, float(d.get("input_scale", 1.0)))

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=1) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text


def relu_forward(net, x):
    """Evaluate ``net`` at one point (shape ``(n,)``) or a batch ``(N, n)``.

    Returns a float for a single point and an ``(N,)`` array for a batch.
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 0 or (arr.ndim == 1 and (net.input_dim > 1 or arr.shape[0] == 1))
    h = as_points(arr, net.input_dim) * net.input_scale
    for layer in net.layers:
        h = h @ layer.weights.T + layer.bias
        if layer.activation == RELU:
            h = np.maximum(h, 0.0)
    out = h[:, 0]
    return float(out[0]) if single else out


def affine_network(w, b):
    """Single linear layer ``x -> w.x + b``."""
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    return ReluNetwork(w.shape[0], [Layer(w.reshape(1, -1), [b], NONE)])


def _deepen(net):
    """Same function, one layer deeper: ``z = relu(z) - relu(-z)``."""
    last = net.layers[-1]
    hidden = Layer(np.vstack([last.weights, -last.weights]),
                   np.concatenate([last.bias, -last.bias]), RELU)
    out = Layer([[1.0, -1.0]], [0.0], NONE)
    return ReluNetwork(net.input_dim, net.layers[:-1] + [hidden, out], net.input_scale)


def _side_by_side(a, b):
    """Equal-depth networks stacked so the last layer emits ``[a(x), b(x)]``."""
    layers = []
    for i, (la, lb) in enumerate(zip(a.layers, b.layers)):
        if i == 0:
            w = np.vstack([la.weights, lb.weights])
        else:
            w = np.zeros((la.weights.shape[0] + lb.weights.shape[0],
                          la.weights.shape[1] + lb.weights.shape[1]))
            w[:la.weights.shape[0], :la.weights.shape[1]] = la.weights
            w[la.weights.shape[0]:, la.weights.shape[1]:] = lb.weights
        layers.append(Layer(w, np.concatenate([la.bias, lb.bias]), la.activation))
    return layers


def _align(nu, mu):
    if nu.input_dim != mu.input_dim:
        raise ValueError(f"input dimensions differ: {nu.input_dim} vs {mu.input_dim}")
    if nu.input_scale != mu.input_scale:
        raise ValueError("input scales differ")
    while nu.depth < mu.depth:
        nu = _deepen(nu)
    while mu.depth < nu.depth:
        mu = _deepen(mu)
    return nu, mu


def max_combine(nu, mu):
    """Network computing ``max(nu(x), mu(x))``, one layer deeper."""
    nu, mu = _align(nu, mu)
    layers = _side_by_side(nu, mu)
    last = layers.pop()
    layers.append(Layer(_SPLIT @ last.weights, _SPLIT @ last.bias, RELU))
    layers.append(Layer(_MERGE, [0.0], NONE))
    return ReluNetwork(nu.input_dim, layers, nu.input_scale)


def difference(nu, mu):
    """Network computing ``nu(x) - mu(x)`` at the depth of the deeper input."""
    nu, mu = _align(nu, mu)
    layers = _side_by_side(nu, mu)
    last = layers.pop()
    sub = np.array([[1.0, -1.0]])
    layers.append(Layer(sub @ last.weights, sub @ last.bias, NONE))
    return ReluNetwork(nu.input_dim, layers, nu.input_scale)


def polynomial_network(poly):
    """Balanced max-tree over the finite monomials of ``poly``."""
    keep = np.flatnonzero(np.isfinite(poly.coeffs))
    if keep.size == 0:
        raise ValueError("polynomial has no finite monomial")
    W = poly.exponents.array()
    nets = [affine_network(W[j], poly.coeffs[j]) for j in keep]
    while len(nets) > 1:
        merged = [max_combine(nets[i], nets[i + 1]) for i in range(0, len(nets) - 1, 2)]
        if len(nets) % 2:
            merged.append(nets[-1])
        nets = merged
    return nets[0]


def rational_to_relu(f):
    """ReLU network with ``forward(x) == f(x)``; ``-inf`` monomials are dropped."""
    net = difference(polynomial_network(f.p), polynomial_network(f.q))
    net.input_scale = float(f.scale_c)
    return net


def load_network(path):
    with open(path, encoding="utf-8") as fh:
        return ReluNetwork.from_dict(json.load(fh))
