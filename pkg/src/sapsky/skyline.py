"""Probabilistic dominance, skyline probabilities and alpha-threshold filtering.

Two independent routes are kept on purpose:

* the vectorised path (``pairwise_dominance``, ``local_filter``,
  ``global_aggregate``) used by the simulator, and
* the scalar reference (``dominates`` and ``brute_force_skyline``), written in
  plain Python loops so that it shares no code with the fast path.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data_gen import UncertainObject

SCAN_BLOCK = 64
LOG_SPACE_THRESHOLD = 1000


@dataclass
class DominanceStats:
    instance_pair_comparisons: int = 0
    objects_scanned: int = 0
    candidates_emitted: int = 0

    def reset(self):
        self.instance_pair_comparisons = 0
        self.objects_scanned = 0
        self.candidates_emitted = 0


@dataclass(eq=False)
class Candidate:
    """An object shipped to the broker; ``local_probability`` is None for raw objects."""

    object: UncertainObject
    local_probability: float | None


def _coords(x):
    return x.values if hasattr(x, "probability") else x


def dominates(a, b) -> bool:
    """Instance-level dominance (smaller is better) on two points."""
    a, b = _coords(a), _coords(b)
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def _stack(objects: Sequence[UncertainObject]):
    if not objects:
        return np.zeros((0, 1, 1)), np.zeros((0, 1))
    shapes = {o.values.shape for o in objects}
    if len(shapes) != 1:
        raise ValueError(f"objects must share (m, d); got {sorted(shapes)}")
    return (np.stack([o.values for o in objects]),
            np.stack([o.probs for o in objects]))


def pairwise_dominance(xv, pv, xu, pu) -> np.ndarray:
    """``out[a, b] = P(v_a dominates u_b)`` for stacked instance arrays.

    ``xv`` is (A, m, d), ``pv`` is (A, m); likewise for the ``u`` side.
    """
    if xv.shape[-1] != xu.shape[-1]:
        raise ValueError(f"dimension mismatch: {xv.shape[-1]} vs {xu.shape[-1]}")
    a = xv[:, None, :, None, :]
    b = xu[None, :, None, :, :]
    dom = np.all(a <= b, axis=-1) & np.any(a < b, axis=-1)
    out = np.einsum("vupq,vp,uq->vu", dom.astype(float), pv, pu)
    # 9 * (1/9) and friends can round just above one
    return np.clip(out, 0.0, 1.0, out=out)


def dominance_probability(a: UncertainObject, b: UncertainObject) -> float:
    """P(a dominates b): total joint mass of instance pairs where a's instance wins."""
    return float(pairwise_dominance(a.values[None], a.probs[None],
                                    b.values[None], b.probs[None])[0, 0])


def _survival(factors: np.ndarray) -> float:
    if factors.size > LOG_SPACE_THRESHOLD:
        with np.errstate(divide="ignore"):
            return float(np.exp(np.sum(np.log(factors))))
    return float(np.prod(factors))


def skyline_probability(u: UncertainObject, dataset: Sequence[UncertainObject]) -> float:
    """Probability that no other object of ``dataset`` dominates ``u``."""
    others = [v for v in dataset if v.object_id != u.object_id]
    if not others:
        return 1.0
    xv, pv = _stack(others)
    dom = pairwise_dominance(xv, pv, u.values[None], u.probs[None])[:, 0]
    return min(1.0, max(0.0, _survival(1.0 - dom)))


def threshold_scan(block: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int,
                   targets: np.ndarray, alpha: float, block_size: int = SCAN_BLOCK):
    """Early-terminating survival scan shared by the filter and the window engine.

    ``block(v_idx, u_idx)`` returns dominance probabilities of dataset rows
    ``v_idx`` over rows ``u_idx``.  Each target ``u`` multiplies the factors
    ``1 - P(v < u)`` in dataset order and stops as soon as the running product
    drops below ``alpha``.  Returns ``(keep, prob, scanned)`` per target where
    ``scanned`` is the number of dominators the sequential scan examines.
    """
    targets = np.asarray(targets, dtype=int)
    t = targets.size
    prod = np.ones(t)
    scanned = np.zeros(t, dtype=np.int64)
    alive = np.ones(t, dtype=bool)
    for start in range(0, n, block_size):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        v = np.arange(start, min(start + block_size, n))
        u = targets[idx]
        factors = 1.0 - block(v, u)
        selfmask = v[:, None] == u[None, :]
        factors[selfmask] = 1.0
        running = prod[idx] * np.cumprod(factors, axis=0)
        # non-self rows seen up to and including each row
        counted = np.cumsum(~selfmask, axis=0)
        below = (running < alpha) & ~selfmask
        hit = below.any(axis=0)
        first = np.where(hit, below.argmax(axis=0), v.size - 1)
        cols = np.arange(idx.size)
        scanned[idx] += counted[first, cols]
        prod[idx] = running[first, cols]
        alive[idx[hit]] = False
    prod = np.clip(prod, 0.0, 1.0)
    return alive, prod, scanned


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def local_filter(window_dataset: Sequence[UncertainObject], alpha: float,
                 stats: DominanceStats | None = None, targets=None) -> list[Candidate]:
    """Objects of the window whose local skyline probability is at least ``alpha``.

    Rejected objects stop scanning at the first dominator that pushes their
    survival product under ``alpha``; survivors are scanned in full so their
    reported probability is exact.  ``targets`` restricts which window
    positions are evaluated (all by default); dominators always range over the
    whole window.
    """
    _check_alpha(alpha)
    objs = list(window_dataset)
    n = len(objs)
    if targets is None:
        targets = np.arange(n)
    targets = np.asarray(targets, dtype=int)
    if n == 0 or targets.size == 0:
        return []
    x, p = _stack(objs)

    def block(v, u):
        return pairwise_dominance(x[v], p[v], x[u], p[u])

    keep, prob, scanned = threshold_scan(block, n, targets, alpha)
    if stats is not None:
        m = x.shape[1]
        stats.instance_pair_comparisons += int(scanned.sum()) * m * m
        stats.objects_scanned += int(targets.size)
        stats.candidates_emitted += int(keep.sum())
    return [Candidate(objs[i], float(pr)) for i, pr, k in zip(targets, prob, keep) if k]


def global_probabilities(objects: Sequence[UncertainObject], local_probs=None,
                         block_size: int = 256) -> np.ndarray:
    """Broker-side skyline probabilities over a set of received objects.

    Where ``local_probs[i]`` is known (not NaN) the object's own node already
    accounted for its local dominators, so only objects from other nodes
    contribute further factors.  Raw objects (NaN) are checked against every
    other received object.
    """
    n = len(objects)
    if n == 0:
        return np.zeros(0)
    x, p = _stack(objects)
    nodes = np.array([o.node_id for o in objects])
    known = np.zeros(n, dtype=bool) if local_probs is None else ~np.isnan(local_probs)
    log_space = n > LOG_SPACE_THRESHOLD
    acc = np.zeros(n) if log_space else np.ones(n)
    for start in range(0, n, block_size):
        v = np.arange(start, min(start + block_size, n))
        f = 1.0 - pairwise_dominance(x[v], p[v], x, p)
        f[v - start, v] = 1.0
        f[(nodes[v][:, None] == nodes[None, :]) & known[None, :]] = 1.0
        if log_space:
            with np.errstate(divide="ignore"):
                acc += np.log(f).sum(axis=0)
        else:
            acc *= np.prod(f, axis=0)
    out = np.exp(acc) if log_space else acc
    if local_probs is not None:
        out = np.where(known, out * np.nan_to_num(local_probs, nan=1.0), out)
    return np.clip(out, 0.0, 1.0)


def broker_comparisons(sizes: Sequence[int], m: int, raw: bool = False) -> int:
    """Instance-pair tests the broker runs for candidate sets of the given sizes."""
    total = sum(sizes)
    if raw:
        return total * (total - 1) * m * m
    return sum(s * (total - s) for s in sizes) * m * m


def global_aggregate(candidate_sets: Sequence[Sequence[Candidate]], alpha: float,
                     stats: DominanceStats | None = None) -> list[tuple[int, float]]:
    """Merge per-node candidates into the global alpha-skyline.

    Each candidate's local probability is multiplied by the survival factors
    of the candidates received from the other nodes.  Candidates whose
    ``local_probability`` is ``None`` are raw objects and get the full
    computation against everything received.
    """
    _check_alpha(alpha)
    cands = [c for cs in candidate_sets for c in cs]
    objs = [c.object for c in cands]
    local = np.array([np.nan if c.local_probability is None else c.local_probability
                      for c in cands], dtype=float)
    probs = global_probabilities(objs, local)
    if stats is not None and objs:
        raw = bool(np.isnan(local).all())
        stats.instance_pair_comparisons += broker_comparisons(
            [len(cs) for cs in candidate_sets], objs[0].m, raw)
        stats.objects_scanned += len(objs)
    out = [(o.object_id, float(pr)) for o, pr in zip(objs, probs) if pr >= alpha]
    if stats is not None:
        stats.candidates_emitted += len(out)
    return out


def brute_force_skyline(dataset: Sequence[UncertainObject], alpha: float = 0.0) -> list[tuple[int, float]]:
    """Reference skyline probabilities by explicit enumeration of instance pairs."""
    rows = []
    for u in dataset:
        u_inst = u.instances
        survive = 1.0
        for v in dataset:
            if v is u or v.object_id == u.object_id:
                continue
            pdom = 0.0
            for a in v.instances:
                for b in u_inst:
                    if dominates(a, b):
                        pdom += a.probability * b.probability
            survive *= 1.0 - pdom
        survive = min(1.0, max(0.0, survive))
        if survive >= alpha:
            rows.append((u.object_id, survive))
    return rows


def write_skyline_csv(path, rows) -> None:
    """Write ``(object_id, node_id, probability)`` rows, most probable first."""
    rows = sorted(rows, key=lambda r: (-r[2], r[0]))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["object_id", "node_id", "probability"])
        for oid, node, prob in rows:
            w.writerow([oid, node, repr(float(prob))])


class CachedWindowFilter:
    """Incremental ``local_filter`` for one sliding window.

    Keeps the pairwise dominance matrix of the window contents in window
    order and only computes rows/columns for new arrivals, so re-filtering the
    whole window every step costs a survival scan instead of a fresh
    ``O(N^2 m^2 d)`` comparison pass.  Results and comparison counts are
    identical to ``local_filter`` on the same contents.
    """

    def __init__(self):
        self.objects: list[UncertainObject] = []
        self._x = None
        self._p = None
        self._dom = np.zeros((0, 0))

    def __len__(self):
        return len(self.objects)

    def update(self, added: Sequence[UncertainObject], evicted: int = 0):
        if evicted:
            del self.objects[:evicted]
            self._x, self._p = self._x[evicted:], self._p[evicted:]
            self._dom = self._dom[evicted:, evicted:]
        if not added:
            return
        xa, pa = _stack(added)
        if self._x is None or len(self._x) == 0:
            self._x, self._p = xa, pa
            self._dom = pairwise_dominance(xa, pa, xa, pa)
        else:
            old = self._dom
            n, k = old.shape[0], len(added)
            dom = np.empty((n + k, n + k))
            dom[:n, :n] = old
            dom[:n, n:] = pairwise_dominance(self._x, self._p, xa, pa)
            dom[n:, :n] = pairwise_dominance(xa, pa, self._x, self._p)
            dom[n:, n:] = pairwise_dominance(xa, pa, xa, pa)
            self._dom = dom
            self._x = np.concatenate([self._x, xa])
            self._p = np.concatenate([self._p, pa])
        self.objects.extend(added)

    @property
    def centers(self) -> np.ndarray:
        if self._x is None or not self.objects:
            return np.zeros((0, 1))
        return self._x.mean(axis=1)

    def scan(self, alpha: float, stats: DominanceStats | None = None):
        """Return ``(keep_mask, probabilities)`` over the window in order."""
        _check_alpha(alpha)
        n = len(self.objects)
        if n == 0:
            return np.zeros(0, dtype=bool), np.zeros(0)
        dom = self._dom
        keep, prob, scanned = threshold_scan(lambda v, u: dom[v[0]:v[-1] + 1][:, u], n, np.arange(n), alpha)
        if stats is not None:
            m = self._x.shape[1]
            stats.instance_pair_comparisons += int(scanned.sum()) * m * m
            stats.objects_scanned += n
            stats.candidates_emitted += int(keep.sum())
        return keep, prob

    def filter(self, alpha: float, stats: DominanceStats | None = None) -> list[Candidate]:
        keep, prob = self.scan(alpha, stats)
        return [Candidate(o, float(pr)) for o, pr, k in zip(self.objects, prob, keep) if k]
