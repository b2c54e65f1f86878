"""Independent reference implementations used to check the fast paths.

Everything here is deliberately naive: path enumeration instead of
reachability, full subset enumeration instead of ancestor pruning,
quadratic pairwise comparisons instead of sorting, quadruple loops
instead of vectorized sums. None of it shares code with the package.
"""

import itertools

import numpy as np


def undirected_paths(dag, x, y):
    """All simple paths between x and y ignoring edge direction."""
    neighbors = {i: set() for i in range(dag.n_nodes)}
    for u, v in dag.edges:
        neighbors[u].add(v)
        neighbors[v].add(u)
    paths = []

    def walk(node, path):
        if node == y:
            paths.append(list(path))
            return
        for nxt in sorted(neighbors[node]):
            if nxt not in path:
                path.append(nxt)
                walk(nxt, path)
                path.pop()

    walk(x, [x])
    return paths


def descendants_closure(dag):
    desc = {}
    children = {i: [] for i in range(dag.n_nodes)}
    for u, v in dag.edges:
        children[u].append(v)
    for start in range(dag.n_nodes):
        seen = set()
        stack = list(children[start])
        while stack:
            node = stack.pop()
            if node not in seen:
                seen.add(node)
                stack.extend(children[node])
        desc[start] = seen
    return desc


def path_is_blocked(dag, path, cond, desc):
    cond = set(cond)
    for k in range(1, len(path) - 1):
        prev, mid, nxt = path[k - 1], path[k], path[k + 1]
        into_from_prev = (prev, mid) in dag.edges
        into_from_next = (nxt, mid) in dag.edges
        if into_from_prev and into_from_next:
            # collider: blocked unless mid or one of its descendants is conditioned
            if mid not in cond and not (desc[mid] & cond):
                return True
        else:
            if mid in cond:
                return True
    return False


def d_separated_oracle(dag, x, y, cond):
    desc = descendants_closure(dag)
    return all(path_is_blocked(dag, p, cond, desc) for p in undirected_paths(dag, x, y))


def minimal_separators_oracle(dag, x, y):
    """Inclusion-minimal separators by exhaustive search over all other nodes."""
    others = [n for n in range(dag.n_nodes) if n not in (x, y)]
    separating = []
    for size in range(len(others) + 1):
        for combo in itertools.combinations(others, size):
            s = frozenset(combo)
            if d_separated_oracle(dag, x, y, s):
                separating.append(s)
    return sorted(
        (s for s in separating if not any(t < s for t in separating)),
        key=lambda s: (len(s), sorted(s)),
    )


def auc_pairwise_oracle(labels, scores):
    """Mann-Whitney AUC: all positive/negative score comparisons, ties half."""
    labels = np.asarray(labels, dtype=bool)
    scores = np.asarray(scores, dtype=float)
    pos = scores[labels]
    neg = scores[~labels]
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def amae_loop_oracle(ref_table, syn_table):
    """The averaged-MAE formula written as bare loops."""
    v_count, k_count, _, n_count = ref_table.shape
    per_v = []
    for v in range(v_count):
        total = 0.0
        for i in range(v_count):
            if i == v:
                continue
            for d in range(k_count):
                ref_sum = 0.0
                syn_sum = 0.0
                for s in range(n_count):
                    ref_sum += ref_table[v, d, i, s]
                    syn_sum += syn_table[v, d, i, s]
                total += abs(ref_sum - syn_sum)
        per_v.append(total / ((v_count - 1) * k_count * n_count))
    return sum(per_v) / v_count, per_v
