"""Two-relation graph convolutional network with exact analytic gradients.

Each propagation layer mixes relation-specific GCN updates::

    H(l+1) = alpha_q * relu(Aq @ H(l) @ Wq(l)) + alpha_p * relu(Ap @ H(l) @ Wp(l))

where Aq/Ap are the symmetrically normalised adjacencies (self-loops
added) of the lending and persistence edge sets. A linear classifier
maps the final embedding to four rating logits; training is full-batch
Adam on a softmax cross-entropy with L2 weight decay and inverted
dropout on every propagation input. All randomness flows from one seed,
so runs are reproducible bit for bit. A relation whose mixing
coefficient is exactly zero is skipped entirely, which makes the
single-relation reductions exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

N_CLASSES = 4


def canonical_edges(edges: np.ndarray, n_nodes: int) -> np.ndarray:
    """Validate and canonicalise an undirected edge set.

    Output rows satisfy i < j, are unique, and are sorted
    lexicographically. Out-of-range endpoints and self-loops raise.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.shape[0] == 0:
        return e
    if e.min() < 0 or e.max() >= n_nodes:
        raise ValueError(f"edge endpoint outside [0, {n_nodes})")
    if np.any(e[:, 0] == e[:, 1]):
        raise ValueError("self-loops are not allowed in input edge sets")
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    return np.unique(np.column_stack((lo, hi)), axis=0)


@dataclass
class HeteroGraph:
    """Node features plus the two typed undirected edge sets."""

    features: np.ndarray
    edges_q: np.ndarray
    edges_p: np.ndarray
    labels: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return self.features.shape[0]


def build_hetero_graph(
    features: np.ndarray,
    edges_q: np.ndarray,
    edges_p: np.ndarray,
    labels: np.ndarray | None = None,
) -> HeteroGraph:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("features must be a nonempty (N, d) matrix")
    n = x.shape[0]
    eq = canonical_edges(edges_q, n)
    ep = canonical_edges(edges_p, n)
    y = None
    if labels is not None:
        y = np.asarray(labels, dtype=np.int64)
        if y.shape != (n,):
            raise ValueError("labels must have one entry per node")
        if np.any((y < 1) | (y > N_CLASSES)):
            raise ValueError("labels must lie in {1,2,3,4}")
    return HeteroGraph(features=x, edges_q=eq, edges_p=ep, labels=y)


def normalize_adjacency(edges: np.ndarray, n_nodes: int) -> sp.csr_matrix:
    """D^{-1/2} (A + I) D^{-1/2} as a sparse CSR matrix.

    The self-loop guarantees a strictly positive diagonal even for
    isolated nodes.
    """
    e = canonical_edges(edges, n_nodes)
    loops = np.arange(n_nodes, dtype=np.int64)
    rows = np.concatenate((e[:, 0], e[:, 1], loops))
    cols = np.concatenate((e[:, 1], e[:, 0], loops))
    degree = 1.0 + np.bincount(np.concatenate((e[:, 0], e[:, 1])), minlength=n_nodes)
    dinv = 1.0 / np.sqrt(degree)
    data = dinv[rows] * dinv[cols]
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n_nodes, n_nodes))
    mat.sort_indices()
    return mat


@dataclass
class GcnModel:
    """Per-relation layer weights, classifier, and mixing coefficients."""

    layer_dims: list[int]
    weights_q: list[np.ndarray]
    weights_p: list[np.ndarray]
    classifier: np.ndarray
    alpha_q: float
    alpha_p: float

    def __post_init__(self) -> None:
        if self.alpha_q < 0 or self.alpha_p < 0:
            raise ValueError("mixing coefficients must be nonnegative")
        if abs(self.alpha_q + self.alpha_p - 1.0) > 1e-9:
            raise ValueError("mixing coefficients must sum to 1")

    @property
    def n_layers(self) -> int:
        return len(self.weights_q)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 1000
    weight_decay: float = 5e-4
    dropout_rate: float = 0.5
    hidden_dim: int = 64
    n_layers: int = 2
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.learning_rate <= 0 or self.epochs < 0:
            raise ValueError("learning_rate must be positive and epochs >= 0")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.hidden_dim < 1 or self.n_layers < 1:
            raise ValueError("hidden_dim and n_layers must be >= 1")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be nonnegative")


@dataclass
class Gradients:
    weights_q: list[np.ndarray]
    weights_p: list[np.ndarray]
    classifier: np.ndarray


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _adjacency_pair(graph: HeteroGraph) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    n = graph.n_nodes
    return normalize_adjacency(graph.edges_q, n), normalize_adjacency(graph.edges_p, n)


def _forward_internal(model, features, adj_q, adj_p, masks):
    n = features.shape[0]
    acts = [features]
    cache = []
    h = features
    for layer in range(model.n_layers):
        hin = h * masks[layer] if masks is not None else h
        s_q = s_p = None
        terms = []
        if model.alpha_q != 0.0:
            s_q = adj_q @ (hin @ model.weights_q[layer])
            terms.append(model.alpha_q * np.maximum(s_q, 0.0))
        if model.alpha_p != 0.0:
            s_p = adj_p @ (hin @ model.weights_p[layer])
            terms.append(model.alpha_p * np.maximum(s_p, 0.0))
        if not terms:
            h = np.zeros((n, model.layer_dims[layer + 1]))
        elif len(terms) == 1:
            h = terms[0]
        else:
            h = terms[0] + terms[1]
        acts.append(h)
        cache.append((hin, s_q, s_p))
    logits = h @ model.classifier
    probs = _softmax_rows(logits)
    return acts, cache, logits, probs


def _check_compatible(model: GcnModel, graph: HeteroGraph, masks) -> None:
    if graph.features.shape[1] != model.layer_dims[0]:
        raise ValueError(
            f"feature width {graph.features.shape[1]} does not match "
            f"model input width {model.layer_dims[0]}"
        )
    if masks is not None:
        if len(masks) != model.n_layers:
            raise ValueError("one dropout mask per propagation layer is required")
        for layer, mask in enumerate(masks):
            expected = (graph.n_nodes, model.layer_dims[layer])
            if mask.shape != expected:
                raise ValueError(f"mask {layer} has shape {mask.shape}, expected {expected}")


def forward(
    model: GcnModel,
    graph: HeteroGraph,
    dropout_masks: list[np.ndarray] | None = None,
    adjacency: tuple[sp.csr_matrix, sp.csr_matrix] | None = None,
) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    """Layer activations, logits, and row-softmax probabilities.

    ``dropout_masks`` multiply each propagation input elementwise; pass
    masks already scaled by 1/(1 - rate) for inverted dropout, or none
    for inference.
    """
    _check_compatible(model, graph, dropout_masks)
    adj_q, adj_p = adjacency if adjacency is not None else _adjacency_pair(graph)
    acts, _, logits, probs = _forward_internal(
        model, graph.features, adj_q, adj_p, dropout_masks
    )
    return acts, logits, probs


def cross_entropy_loss(
    probs: np.ndarray, labels: np.ndarray, model: GcnModel, weight_decay: float
) -> float:
    """Mean negative log-likelihood plus L2 decay over every weight matrix."""
    y = np.asarray(labels, dtype=np.int64)
    picked = probs[np.arange(probs.shape[0]), y - 1]
    data_term = float(-np.log(np.maximum(picked, 1e-12)).mean())
    reg = 0.0
    for w in (*model.weights_q, *model.weights_p, model.classifier):
        reg += float(np.sum(w * w))
    return data_term + 0.5 * weight_decay * reg


def backward(
    model: GcnModel,
    graph: HeteroGraph,
    labels: np.ndarray,
    dropout_masks: list[np.ndarray] | None = None,
    weight_decay: float = 0.0,
    adjacency: tuple[sp.csr_matrix, sp.csr_matrix] | None = None,
) -> Gradients:
    """Exact gradients of :func:`cross_entropy_loss` for every weight.

    The ReLU subgradient at exactly 0 is taken to be 0. Relations with a
    zero mixing coefficient receive only their weight-decay gradient.
    """
    _check_compatible(model, graph, dropout_masks)
    adj_q, adj_p = adjacency if adjacency is not None else _adjacency_pair(graph)
    acts, cache, _, probs = _forward_internal(
        model, graph.features, adj_q, adj_p, dropout_masks
    )
    y = np.asarray(labels, dtype=np.int64)
    n = graph.n_nodes
    onehot = np.zeros((n, N_CLASSES))
    onehot[np.arange(n), y - 1] = 1.0

    dz = (probs - onehot) / n
    grad_c = acts[-1].T @ dz + weight_decay * model.classifier
    dh = dz @ model.classifier.T

    grads_q: list[np.ndarray] = [np.empty(0)] * model.n_layers
    grads_p: list[np.ndarray] = [np.empty(0)] * model.n_layers
    for layer in reversed(range(model.n_layers)):
        hin, s_q, s_p = cache[layer]
        dhin = np.zeros_like(hin)
        if model.alpha_q != 0.0:
            ds = (model.alpha_q * dh) * (s_q > 0)
            propagated = adj_q @ ds
            grads_q[layer] = hin.T @ propagated + weight_decay * model.weights_q[layer]
            dhin += propagated @ model.weights_q[layer].T
        else:
            grads_q[layer] = weight_decay * model.weights_q[layer]
        if model.alpha_p != 0.0:
            ds = (model.alpha_p * dh) * (s_p > 0)
            propagated = adj_p @ ds
            grads_p[layer] = hin.T @ propagated + weight_decay * model.weights_p[layer]
            dhin += propagated @ model.weights_p[layer].T
        else:
            grads_p[layer] = weight_decay * model.weights_p[layer]
        dh = dhin * dropout_masks[layer] if dropout_masks is not None else dhin
    return Gradients(weights_q=grads_q, weights_p=grads_p, classifier=grad_c)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, (fan_in, fan_out))


def train(
    graph: HeteroGraph,
    config: TrainConfig,
    alpha_q: float = 0.1,
    alpha_p: float = 0.9,
) -> GcnModel:
    """Full-batch Adam training on a labelled graph, seeded end to end."""
    if graph.labels is None:
        raise ValueError("training requires labels on the graph")
    n, d = graph.features.shape
    dims = [d] + [config.hidden_dim] * config.n_layers
    rng = np.random.default_rng(config.seed)
    weights_q = [_glorot(rng, dims[l], dims[l + 1]) for l in range(config.n_layers)]
    weights_p = [_glorot(rng, dims[l], dims[l + 1]) for l in range(config.n_layers)]
    classifier = _glorot(rng, dims[-1], N_CLASSES)
    model = GcnModel(
        layer_dims=dims,
        weights_q=weights_q,
        weights_p=weights_p,
        classifier=classifier,
        alpha_q=alpha_q,
        alpha_p=alpha_p,
    )
    adjacency = _adjacency_pair(graph)

    params = [*model.weights_q, *model.weights_p, model.classifier]
    m_state = [np.zeros_like(w) for w in params]
    v_state = [np.zeros_like(w) for w in params]
    keep = 1.0 - config.dropout_rate
    for epoch in range(config.epochs):
        masks = None
        if config.dropout_rate > 0.0:
            masks = [
                (rng.random((n, dims[layer])) >= config.dropout_rate) / keep
                for layer in range(config.n_layers)
            ]
        grads = backward(
            model,
            graph,
            graph.labels,
            dropout_masks=masks,
            weight_decay=config.weight_decay,
            adjacency=adjacency,
        )
        gradient_list = [*grads.weights_q, *grads.weights_p, grads.classifier]
        t = epoch + 1
        bias1 = 1.0 - config.adam_beta1**t
        bias2 = 1.0 - config.adam_beta2**t
        for w, g, m, v in zip(params, gradient_list, m_state, v_state):
            m *= config.adam_beta1
            m += (1.0 - config.adam_beta1) * g
            v *= config.adam_beta2
            v += (1.0 - config.adam_beta2) * (g * g)
            w -= config.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + config.adam_eps)
    return model


def predict(model: GcnModel, graph: HeteroGraph) -> np.ndarray:
    """Predicted rating per node (argmax probability, ties toward class 1)."""
    _, _, probs = forward(model, graph)
    return np.argmax(probs, axis=1).astype(np.int64) + 1


_CHECKPOINT_VERSION = 1


def save_model(model: GcnModel, path: str | Path) -> None:
    """Persist a model as a versioned npz container."""
    arrays: dict[str, np.ndarray] = {
        "version": np.array([_CHECKPOINT_VERSION], np.int64),
        "layer_dims": np.asarray(model.layer_dims, np.int64),
        "alphas": np.array([model.alpha_q, model.alpha_p]),
        "classifier": model.classifier,
    }
    for layer, w in enumerate(model.weights_q):
        arrays[f"wq_{layer}"] = w
    for layer, w in enumerate(model.weights_p):
        arrays[f"wp_{layer}"] = w
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path: str | Path) -> GcnModel:
    with np.load(path) as data:
        version = int(data["version"][0])
        if version != _CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        layer_dims = [int(v) for v in data["layer_dims"]]
        n_layers = len(layer_dims) - 1
        return GcnModel(
            layer_dims=layer_dims,
            weights_q=[data[f"wq_{layer}"] for layer in range(n_layers)],
            weights_p=[data[f"wp_{layer}"] for layer in range(n_layers)],
            classifier=data["classifier"],
            alpha_q=float(data["alphas"][0]),
            alpha_p=float(data["alphas"][1]),
        )
