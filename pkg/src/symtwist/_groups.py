"""Invariant factors of finite abelian p-groups from element orders."""

from __future__ import annotations

from collections import Counter


def _log_p(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k


def exponents_from_orders(orders, p: int) -> list[int]:
    """Exponents ``r_1 >= r_2 >= ...`` of ``(+)Z/p^{r_i}`` from all element orders.

    Uses ``#{x : p^k x = 0} = p^(sum_i min(k, r_i))``, so successive
    differences of the logarithms count the cyclic factors of order >= p^k.
    """
    counts = Counter(_log_p(o, p) for o in orders)
    if not counts:
        raise ValueError("empty group")
    top = max(counts)
    cumulative = []
    total = 0
    for k in range(top + 1):
        total += counts.get(k, 0)
        cumulative.append(_log_p(total, p))
    at_least = [cumulative[k] - cumulative[k - 1] for k in range(1, top + 1)]
    exps = []
    for k in range(top, 0, -1):
        nxt = at_least[k] if k < top else 0
        exps.extend([k] * (at_least[k - 1] - nxt))
    return exps


def factors_from_exponents(exps, p: int) -> tuple[int, ...]:
    """Invariant factors, ascending, each dividing the next."""
    return tuple(sorted(p ** r for r in exps if r > 0))


def format_factors(factors) -> str:
    factors = [f for f in factors if f > 1]
    if not factors:
        return "0"
    return "⊕".join(f"Z/{f}" for f in sorted(factors))
