"""Linear-chain CRF: parameterization, log-domain inference, likelihood
gradient, Viterbi decoding, training driver, and model persistence.

Scores factor as begin[y0] + sum_t state(x,t,yt) + sum_t trans[y(t-1),yt]
+ end[yT-1], with state scores summing one weight per active attribute.
All inference runs in the natural-log domain with max-shifted logsumexp.

The gradient path is batched: sentences are grouped by length, each group's
attribute activations live in one CSR matrix, and forward-backward runs over
(B, T, K) arrays for the whole group at once. build_lattice is the same
engine with B = 1, so the single-sentence and training paths cannot drift
apart.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable, Collection, Sequence

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from nagatag.corpus import Sentence, TaggedCorpus, TagSet, Token
from nagatag.features import FeatureConfig, sentence_attributes
from nagatag.optim import IterationTrace, OptimConfig, minimize

Attrs = Sequence[Collection[str]]


@dataclass(frozen=True)
class TrainingMeta:
    c1: float
    c2: float
    iterations: int
    final_objective: float


@dataclass(frozen=True)
class ModelParameters:
    tagset: TagSet
    attribute_index: dict[str, int]
    state_weights: np.ndarray  # (A, K)
    transition_weights: np.ndarray  # (K, K), row = previous tag
    begin_weights: np.ndarray  # (K,)
    end_weights: np.ndarray  # (K,)
    training: TrainingMeta | None = None

    def __post_init__(self):
        K = len(self.tagset)
        A = len(self.attribute_index)
        if sorted(self.attribute_index.values()) != list(range(A)):
            raise ValueError("attribute_index must map onto 0..A-1 bijectively")
        if self.state_weights.shape != (A, K):
            raise ValueError(f"state_weights must be {(A, K)}, got {self.state_weights.shape}")
        if self.transition_weights.shape != (K, K):
            raise ValueError(f"transition_weights must be {(K, K)}")
        if self.begin_weights.shape != (K,) or self.end_weights.shape != (K,):
            raise ValueError(f"boundary weights must have shape ({K},)")
        for arr in (self.state_weights, self.transition_weights,
                    self.begin_weights, self.end_weights):
            if not np.all(np.isfinite(arr)):
                raise ValueError("all weights must be finite")

    @property
    def n_tags(self) -> int:
        return len(self.tagset)

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_index)


def zero_model(tagset: TagSet, attribute_index: dict[str, int]) -> ModelParameters:
    A, K = len(attribute_index), len(tagset)
    return ModelParameters(
        tagset=tagset,
        attribute_index=dict(attribute_index),
        state_weights=np.zeros((A, K)),
        transition_weights=np.zeros((K, K)),
        begin_weights=np.zeros(K),
        end_weights=np.zeros(K),
    )


@dataclass(frozen=True)
class Lattice:
    state_scores: np.ndarray  # (T, K)
    log_alpha: np.ndarray  # (T, K)
    log_beta: np.ndarray  # (T, K)
    log_Z: float


@dataclass
class ModelGradient:
    state: np.ndarray
    transitions: np.ndarray
    begin: np.ndarray
    end: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.state.ravel(), self.transitions.ravel(), self.begin, self.end]
        )


def _unpack(w: np.ndarray, A: int, K: int):
    """Views into a flat parameter vector, in pack() order."""
    state = w[: A * K].reshape(A, K)
    trans = w[A * K : A * K + K * K].reshape(K, K)
    begin = w[A * K + K * K : A * K + K * K + K]
    end = w[A * K + K * K + K :]
    return state, trans, begin, end


def _forward_backward(s3: np.ndarray, trans: np.ndarray,
                      begin: np.ndarray, end: np.ndarray):
    """Batched log-domain recursions over (B, T, K) state scores."""
    B, T, K = s3.shape
    log_alpha = np.empty((B, T, K))
    log_alpha[:, 0, :] = begin + s3[:, 0, :]
    for t in range(1, T):
        log_alpha[:, t, :] = (
            logsumexp(log_alpha[:, t - 1, :, None] + trans[None, :, :], axis=1)
            + s3[:, t, :]
        )
    log_beta = np.empty((B, T, K))
    log_beta[:, T - 1, :] = end
    for t in range(T - 2, -1, -1):
        log_beta[:, t, :] = logsumexp(
            trans[None, :, :] + (s3[:, t + 1, :] + log_beta[:, t + 1, :])[:, None, :],
            axis=2,
        )
    log_Z = logsumexp(log_alpha[:, T - 1, :] + end, axis=1)
    return log_alpha, log_beta, log_Z


def _attr_indices(attrs: Attrs, attribute_index: dict[str, int]) -> list[list[int]]:
    """Dense indices per position; attributes outside the vocabulary score 0."""
    return [
        sorted(attribute_index[a] for a in position if a in attribute_index)
        for position in attrs
    ]


def _state_scores(model: ModelParameters, attrs: Attrs) -> np.ndarray:
    T, K = len(attrs), model.n_tags
    s = np.zeros((T, K))
    for t, idxs in enumerate(_attr_indices(attrs, model.attribute_index)):
        if idxs:
            s[t] = model.state_weights[idxs].sum(axis=0)
    return s


def build_lattice(model: ModelParameters, attrs: Attrs) -> Lattice:
    if len(attrs) == 0:
        raise ValueError("cannot build a lattice for an empty sentence")
    s = _state_scores(model, attrs)
    la, lb, log_Z = _forward_backward(
        s[None], model.transition_weights, model.begin_weights, model.end_weights
    )
    lattice = Lattice(s, la[0], lb[0], float(log_Z[0]))
    # cross-check: the backward recursion must reproduce the same mass
    backward_Z = float(
        logsumexp(lattice.log_beta[0] + model.begin_weights + s[0])
    )
    if abs(backward_Z - lattice.log_Z) > 1e-9 * max(1.0, abs(lattice.log_Z)):
        raise ArithmeticError(
            f"forward/backward disagree on log_Z: {lattice.log_Z} vs {backward_Z}"
        )
    return lattice


def sequence_log_score(model: ModelParameters, attrs: Attrs, tags: Sequence[int]) -> float:
    if len(tags) != len(attrs):
        raise ValueError(f"{len(tags)} tags for {len(attrs)} positions")
    K = model.n_tags
    if any(not 0 <= y < K for y in tags):
        raise ValueError("tag index out of range")
    s = _state_scores(model, attrs)
    y = np.asarray(tags)
    score = model.begin_weights[y[0]] + model.end_weights[y[-1]] + s[np.arange(len(y)), y].sum()
    if len(y) > 1:
        score += model.transition_weights[y[:-1], y[1:]].sum()
    return float(score)


def posterior_marginals(lattice: Lattice, model: ModelParameters):
    """(T,K) unary and (T-1,K,K) pairwise posterior probabilities."""
    unary = np.exp(lattice.log_alpha + lattice.log_beta - lattice.log_Z)
    T, K = lattice.state_scores.shape
    if T == 1:
        return unary, np.zeros((0, K, K))
    right = lattice.state_scores[1:] + lattice.log_beta[1:]  # (T-1, K)
    pairwise = np.exp(
        lattice.log_alpha[:-1, :, None]
        + model.transition_weights[None, :, :]
        + right[:, None, :]
        - lattice.log_Z
    )
    return unary, pairwise


def viterbi(model: ModelParameters, attrs: Attrs) -> tuple[list[int], float]:
    """Best tag sequence and its log score. Ties pick the lowest tag index
    (argmax returns the first maximizer at every decision)."""
    if len(attrs) == 0:
        raise ValueError("cannot decode an empty sentence")
    s = _state_scores(model, attrs)
    T, K = s.shape
    delta = model.begin_weights + s[0]
    back = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        scores = delta[:, None] + model.transition_weights
        back[t] = np.argmax(scores, axis=0)
        delta = scores[back[t], np.arange(K)] + s[t]
    final = delta + model.end_weights
    last = int(np.argmax(final))
    path = [last]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t][path[-1]]))
    path.reverse()
    return path, float(final[last])


def tag_sentence(
    model: ModelParameters, config: FeatureConfig, words: Sequence[str]
) -> Sentence:
    if not words:
        raise ValueError("cannot tag an empty sentence")
    attrs = sentence_attributes(words, config)
    tags, _ = viterbi(model, attrs)
    return Sentence(tuple(Token(w, y) for w, y in zip(words, tags)))


@dataclass
class _Group:
    """All sentences of one length, as a single sparse activation matrix."""

    X: sparse.csr_matrix  # (B*T, A), one row per token
    gold: np.ndarray  # (B, T)


@dataclass
class _PreparedBatch:
    groups: list[_Group]
    obs_state: np.ndarray  # (A, K)
    obs_trans: np.ndarray  # (K, K)
    obs_begin: np.ndarray  # (K,)
    obs_end: np.ndarray  # (K,)
    n_sentences: int
    n_tokens: int


def _prepare(
    indexed: list[tuple[list[list[int]], Sequence[int]]], A: int, K: int
) -> _PreparedBatch:
    by_len: dict[int, list[tuple[list[list[int]], Sequence[int]]]] = {}
    for entry in indexed:
        by_len.setdefault(len(entry[1]), []).append(entry)

    groups = []
    obs_state = np.zeros((A, K))
    obs_trans = np.zeros((K, K))
    obs_begin = np.zeros(K)
    obs_end = np.zeros(K)
    n_tokens = 0
    for T in sorted(by_len):
        entries = by_len[T]
        B = len(entries)
        rows, cols = [], []
        gold = np.empty((B, T), dtype=np.int64)
        for b, (idx_lists, tags) in enumerate(entries):
            gold[b] = tags
            for t, idxs in enumerate(idx_lists):
                rows.extend([b * T + t] * len(idxs))
                cols.extend(idxs)
        X = sparse.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(B * T, A)
        )
        groups.append(_Group(X, gold))

        flat = gold.ravel()
        onehot = np.zeros((B * T, K))
        onehot[np.arange(B * T), flat] = 1.0
        obs_state += X.T @ onehot
        if T > 1:
            np.add.at(obs_trans, (gold[:, :-1].ravel(), gold[:, 1:].ravel()), 1.0)
        obs_begin += np.bincount(gold[:, 0], minlength=K)
        obs_end += np.bincount(gold[:, -1], minlength=K)
        n_tokens += B * T
    return _PreparedBatch(
        groups, obs_state, obs_trans, obs_begin, obs_end, len(indexed), n_tokens
    )


def _nll_prepared(
    state_w: np.ndarray,
    trans: np.ndarray,
    begin: np.ndarray,
    end: np.ndarray,
    prepared: _PreparedBatch,
    c2: float,
) -> tuple[float, ModelGradient]:
    A, K = state_w.shape
    value = 0.0
    grad_state = np.zeros((A, K))
    grad_trans = np.zeros((K, K))
    grad_begin = np.zeros(K)
    grad_end = np.zeros(K)

    for group in prepared.groups:
        gold = group.gold
        B, T = gold.shape
        s3 = (group.X @ state_w).reshape(B, T, K)
        la, lb, log_Z = _forward_backward(s3, trans, begin, end)
        unary = np.exp(la + lb - log_Z[:, None, None])
        grad_state += group.X.T @ unary.reshape(B * T, K)
        grad_begin += unary[:, 0, :].sum(axis=0)
        grad_end += unary[:, -1, :].sum(axis=0)
        if T > 1:
            pairwise = np.exp(
                la[:, :-1, :, None]
                + trans[None, None, :, :]
                + (s3[:, 1:, :] + lb[:, 1:, :])[:, :, None, :]
                - log_Z[:, None, None, None]
            )
            grad_trans += pairwise.sum(axis=(0, 1))

        b_idx = np.arange(B)[:, None]
        t_idx = np.arange(T)[None, :]
        gold_score = (
            s3[b_idx, t_idx, gold].sum()
            + begin[gold[:, 0]].sum()
            + end[gold[:, -1]].sum()
        )
        if T > 1:
            gold_score += trans[gold[:, :-1], gold[:, 1:]].sum()
        value += float(log_Z.sum() - gold_score)

    grad_state -= prepared.obs_state
    grad_trans -= prepared.obs_trans
    grad_begin -= prepared.obs_begin
    grad_end -= prepared.obs_end

    if c2:
        value += c2 * float(
            np.sum(state_w**2) + np.sum(trans**2) + np.sum(begin**2) + np.sum(end**2)
        )
        grad_state += 2.0 * c2 * state_w
        grad_trans += 2.0 * c2 * trans
        grad_begin += 2.0 * c2 * begin
        grad_end += 2.0 * c2 * end

    if not np.isfinite(value):
        raise ArithmeticError(f"non-finite objective value: {value}")
    return value, ModelGradient(grad_state, grad_trans, grad_begin, grad_end)


def nll_and_gradient(
    model: ModelParameters,
    batch: list[tuple[Attrs, Sequence[int]]],
    c2: float = 0.0,
) -> tuple[float, ModelGradient]:
    """Regularized negative conditional log-likelihood of a batch and its
    gradient: expected counts minus observed counts plus 2*c2*w."""
    if not batch:
        raise ValueError("batch must be non-empty")
    K = model.n_tags
    indexed = []
    for attrs, tags in batch:
        if len(attrs) != len(tags):
            raise ValueError(f"{len(tags)} tags for {len(attrs)} positions")
        if any(not 0 <= y < K for y in tags):
            raise ValueError("tag index out of range")
        indexed.append((_attr_indices(attrs, model.attribute_index), tuple(tags)))
    prepared = _prepare(indexed, model.n_attributes, K)
    return _nll_prepared(
        model.state_weights,
        model.transition_weights,
        model.begin_weights,
        model.end_weights,
        prepared,
        c2,
    )


def build_attribute_index(
    corpus: TaggedCorpus, config: FeatureConfig = FeatureConfig()
) -> dict[str, int]:
    """Sorted vocabulary of every attribute occurring in the corpus."""
    seen: set[str] = set()
    for sentence in corpus:
        for attrs in sentence_attributes(sentence.words(), config):
            seen.update(attrs)
    return {attr: i for i, attr in enumerate(sorted(seen))}


def train_model(
    corpus: TaggedCorpus,
    tagset: TagSet,
    feature_config: FeatureConfig = FeatureConfig(),
    optim_config: OptimConfig = OptimConfig(),
    log: Callable[[str], None] | None = None,
) -> tuple[ModelParameters, IterationTrace]:
    """Fit CRF weights on a tagged corpus from all-zero initial weights.

    The smooth objective handed to the optimizer carries the L2 term
    (optim_config.c2); the L1 term (optim_config.c1) is applied inside
    the optimizer itself.
    """
    if len(corpus) == 0:
        raise ValueError("training corpus is empty")
    attribute_index = build_attribute_index(corpus, feature_config)
    A, K = len(attribute_index), len(tagset)

    indexed = []
    for sentence in corpus:
        attrs = sentence_attributes(sentence.words(), feature_config)
        idx_lists = _attr_indices(attrs, attribute_index)
        indexed.append((idx_lists, sentence.tags()))
    prepared = _prepare(indexed, A, K)

    def objective(w: np.ndarray) -> tuple[float, np.ndarray]:
        state_w, trans, begin, end = _unpack(w, A, K)
        value, grad = _nll_prepared(state_w, trans, begin, end, prepared, optim_config.c2)
        return value, grad.pack()

    x0 = np.zeros(A * K + K * K + 2 * K)
    w_star, trace = minimize(objective, x0, optim_config, log=log)
    state_w, trans, begin, end = _unpack(w_star, A, K)
    model = ModelParameters(
        tagset=tagset,
        attribute_index=attribute_index,
        state_weights=state_w.copy(),
        transition_weights=trans.copy(),
        begin_weights=begin.copy(),
        end_weights=end.copy(),
        training=TrainingMeta(
            c1=optim_config.c1,
            c2=optim_config.c2,
            iterations=trace.iterations,
            final_objective=trace.final_objective,
        ),
    )
    return model, trace


FORMAT_VERSION = 1


def save_model(path: str, model: ModelParameters, feature_config: FeatureConfig):
    """Single JSON document; floats round-trip bit-faithfully via repr."""
    a_vals = model.state_weights.nonzero()
    doc = {
        "format_version": FORMAT_VERSION,
        "tagset": list(model.tagset.names),
        "feature_config": asdict(feature_config),
        "attributes": _attrs_in_index_order(model.attribute_index),
        "state_weights": [
            [int(a), int(k), float(model.state_weights[a, k])]
            for a, k in zip(*a_vals)
        ],
        "transitions": model.transition_weights.tolist(),
        "begin": model.begin_weights.tolist(),
        "end": model.end_weights.tolist(),
        "training": asdict(model.training) if model.training else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)
        fh.write("\n")


def _attrs_in_index_order(attribute_index: dict[str, int]) -> list[str]:
    out = [""] * len(attribute_index)
    for attr, i in attribute_index.items():
        out[i] = attr
    return out


def load_model(path: str) -> tuple[ModelParameters, FeatureConfig]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format: {doc.get('format_version')!r}")
    tagset = TagSet(tuple(doc["tagset"]))
    feature_config = FeatureConfig(**doc["feature_config"])
    attributes = doc["attributes"]
    if len(set(attributes)) != len(attributes):
        raise ValueError("duplicate attributes in model file")
    A, K = len(attributes), len(tagset)
    state = np.zeros((A, K))
    for a, k, w in doc["state_weights"]:
        if not (0 <= a < A and 0 <= k < K):
            raise ValueError(f"state weight index out of range: [{a}, {k}]")
        state[a, k] = w
    trans = np.asarray(doc["transitions"], dtype=np.float64)
    begin = np.asarray(doc["begin"], dtype=np.float64)
    end = np.asarray(doc["end"], dtype=np.float64)
    training = TrainingMeta(**doc["training"]) if doc.get("training") else None
    model = ModelParameters(
        tagset=tagset,
        attribute_index={a: i for i, a in enumerate(attributes)},
        state_weights=state,
        transition_weights=trans,
        begin_weights=begin,
        end_weights=end,
        training=training,
    )
    return model, feature_config
