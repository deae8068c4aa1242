"""Tiny brute-force solvers for the source problems behind the gadget
generators.  Independent of the package's oracles on purpose."""

import itertools


def sat_brute(clauses):
    """Satisfying assignment as {var: bool}, or None."""
    nv = max(abs(l) for cl in clauses for l in cl)
    for bits in itertools.product([False, True], repeat=nv):
        assign = {i + 1: bits[i] for i in range(nv)}
        if all(
            any(assign[abs(l)] == (l > 0) for l in cl) for cl in clauses
        ):
            return assign
    return None


def clique_cover_leq(n, edges, k):
    """Can the graph's vertices be partitioned into at most k cliques?"""
    eset = {(min(u, v), max(u, v)) for u, v in edges}

    def is_clique(block):
        return all(
            (min(a, b), max(a, b)) in eset
            for a, b in itertools.combinations(block, 2)
        )

    def rec(i, blocks):
        if i == n:
            return True
        for b in blocks:
            if all((min(i, x), max(i, x)) in eset for x in b):
                b.append(i)
                if rec(i + 1, blocks):
                    return True
                b.pop()
        if len(blocks) < k:
            blocks.append([i])
            if rec(i + 1, blocks):
                return True
            blocks.pop()
        return False

    assert all(is_clique([u, v]) for u, v in eset)
    return rec(0, [])


def set_cover_leq(n_elements, sets, k):
    universe = frozenset(range(n_elements))
    if not universe:
        return True
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(len(sets)), size):
            covered = frozenset().union(*(frozenset(sets[j]) for j in combo))
            if covered >= universe:
                return True
    return False


def multicut_star_leq(n_leaves, pairs, k):
    """Deleting at most k star edges = hitting every pair by a deleted
    leaf (vertex cover of the pair graph)."""
    leaves = sorted({x for p in pairs for x in p})
    for size in range(0, k + 1):
        for combo in itertools.combinations(leaves, size):
            chosen = set(combo)
            if all(u in chosen or v in chosen for u, v in pairs):
                return True
    return False
