"""Symmetric-group machinery: Coxeter elements from maximal chains, reduced
words, and weak-order intervals.

Permutations are tuples in one-line notation on 1..N.  A label word
(i1, ..., ik) evaluates by applying s_{i1} first: start from the identity
and repeatedly swap the entries at positions i and i+1 (right
multiplication), so prefixes of reduced words walk the right weak order.
"""

from __future__ import annotations

from functools import lru_cache

from .lattice import CoverLattice, labeled_isomorphic
from .matchings import matching_lattice
from .modules import StringModule, submodule_lattice

Permutation = tuple[int, ...]


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def apply_right(perm: Permutation, i: int) -> Permutation:
    """perm * s_i: swap the entries at positions i, i+1 (1-based)."""
    if not 1 <= i <= len(perm) - 1:
        raise IndexError(f"generator s_{i} out of range for n={len(perm)}")
    out = list(perm)
    out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


def evaluate_word(n: int, word) -> Permutation:
    perm = identity(n)
    for i in word:
        perm = apply_right(perm, i)
    return perm


def length(perm: Permutation) -> int:
    """Inversion count."""
    n = len(perm)
    return sum(
        1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
    )


def right_descents(perm: Permutation) -> tuple[int, ...]:
    return tuple(i for i in range(1, len(perm)) if perm[i - 1] > perm[i])


@lru_cache(maxsize=None)
def reduced_words(perm: Permutation) -> tuple[tuple[int, ...], ...]:
    """All reduced expressions, by recursion on right descents."""
    if not right_descents(perm):
        return ((),)
    out = []
    for i in right_descents(perm):
        for word in reduced_words(apply_right(perm, i)):
            out.append(word + (i,))
    return tuple(sorted(out))


def weak_interval(sigma: Permutation) -> CoverLattice:
    """The interval [e, sigma] in the right weak order, by prefix closure."""
    elements = {identity(len(sigma))}
    for word in reduced_words(sigma):
        perm = identity(len(sigma))
        for i in word:
            perm = apply_right(perm, i)
            elements.add(perm)
    lengths = {u: length(u) for u in elements}
    covers = []
    for u in elements:
        for i in range(1, len(sigma)):
            v = apply_right(u, i)
            if v in elements and lengths[v] == lengths[u] + 1:
                covers.append((u, v, i))
    return CoverLattice(sorted(elements, key=lambda u: (lengths[u], u)), covers)


class ChainProductError(AssertionError):
    """Two maximal chains of one lattice evaluated to different permutations."""


def coxeter_element(lat: CoverLattice) -> tuple[Permutation, tuple[int, ...]]:
    """Evaluate all maximal chains; they must agree.  Returns (perm, witness).

    The witness is the label-lexicographically least maximal chain.  The
    ambient group is on m+1 letters where m is the largest label.
    """
    chains = lat.maximal_chains()
    m = max((lab for _, _, lab in lat.covers), default=0)
    n = m + 1
    sigma = evaluate_word(n, chains[0])
    for word in chains[1:]:
        other = evaluate_word(n, word)
        if other != sigma:
            raise ChainProductError(
                f"chains {chains[0]} and {word} evaluate to {sigma} != {other}"
            )
    return sigma, chains[0]


def is_coxeter_element(sigma: Permutation, word) -> bool:
    """Every generator in the word's support appears exactly once."""
    return len(set(word)) == len(word) and evaluate_word(len(sigma), word) == sigma


def commutation_graph_connected(words) -> bool:
    """Words connected by single swaps of adjacent commuting generators."""
    words = list(words)
    index = {w: i for i, w in enumerate(words)}
    if not words:
        return True
    adj: dict[int, set[int]] = {i: set() for i in range(len(words))}
    for w, i in index.items():
        for t in range(len(w) - 1):
            a, b = w[t], w[t + 1]
            if abs(a - b) > 1:
                swapped = w[:t] + (b, a) + w[t + 2 :]
                j = index.get(swapped)
                if j is not None:
                    adj[i].add(j)
                    adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(words)


def verify_three_way(m: StringModule) -> dict:
    """Build the matching lattice, submodule lattice and weak interval and
    check that they agree as labeled lattices; report what was found."""
    lat_g = matching_lattice(m.graph)
    lat_m = submodule_lattice(m)
    report: dict = {
        "word": m.word.render(),
        "matching_lattice_size": len(lat_g),
        "submodule_lattice_size": len(lat_m),
        "failures": [],
    }
    try:
        sigma, witness = coxeter_element(lat_m)
    except ChainProductError as exc:
        report["failures"].append({"check": "chain-product-invariance", "detail": str(exc)})
        return report
    lat_w = weak_interval(sigma)
    report["coxeter_element"] = list(sigma)
    report["witness_chain"] = list(witness)
    report["interval_size"] = len(lat_w)
    chains = lat_m.maximal_chains()
    words = reduced_words(sigma)
    report["maximal_chains"] = len(chains)
    report["reduced_words"] = len(words)
    if set(chains) != set(words):
        report["failures"].append(
            {"check": "reduced-word-chain-bijection",
             "detail": f"{len(words)} reduced words vs {len(chains)} chains"}
        )
    if labeled_isomorphic(lat_g, lat_m) is None:
        report["failures"].append({"check": "matching-submodule-isomorphism"})
    if labeled_isomorphic(lat_m, lat_w) is None:
        report["failures"].append({"check": "submodule-interval-isomorphism"})
    if labeled_isomorphic(lat_g, lat_w) is None:
        report["failures"].append({"check": "matching-interval-isomorphism"})
    if not all(is_coxeter_element(sigma, w) for w in words):
        report["failures"].append({"check": "coxeter-element-support"})
    if not commutation_graph_connected(words):
        report["failures"].append({"check": "commutation-connectivity"})
    report["ok"] = not report["failures"]
    return report
