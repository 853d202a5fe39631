"""Turn a probabilistic ranking into deterministic rankings users can see.

A doubly stochastic matrix says "show item i at rank j with probability
P[i,j]" — but a user sees one concrete ordering.  The decomposition step
writes P as a lottery over at most (N-1)^2 + 1 permutations; sampling then
picks one per request (seeded) or one per user (stable hash), so the same
user always gets the same ranking while the population marginals match P.
"""

from __future__ import annotations

from collections import Counter

from fairexposure import (
    PositionBias,
    RankingProblem,
    decompose,
    demographic_parity,
    load_jobseeker,
    sample_for_user,
    sample_indices,
    solve_problem,
)


def main() -> None:
    items = load_jobseeker()
    problem = RankingProblem(
        items=items, position_bias=PositionBias.log_discount(len(items))
    )
    ids = [item.id for item in items]

    report = solve_problem(problem, [demographic_parity(problem, "M", "F")])
    lottery = decompose(report.matrix)

    print(f"lottery over {len(lottery.terms)} deterministic rankings:")
    for term in lottery.terms:
        ordering = " > ".join(ids[i] for i in term.ranking)
        print(f"  theta = {term.theta:.6f}   {ordering}")

    print()
    print("stable per-user draws (same key, same ranking, forever):")
    for user in ("alice", "bob", "carol"):
        ranking = sample_for_user(lottery, user)
        print(f"  {user:<6} -> {' > '.join(ids[i] for i in ranking)}")

    print()
    draws = 100_000
    picks = sample_indices(lottery, draws, rng=7)
    counts = Counter(picks.tolist())
    print(f"{draws} seeded draws vs lottery weights:")
    for index, term in enumerate(lottery.terms):
        frequency = counts.get(index, 0) / draws
        print(
            f"  term {index}: theta = {term.theta:.6f}, "
            f"empirical = {frequency:.6f}, gap = {abs(frequency - term.theta):.6f}"
        )


if __name__ == "__main__":
    main()
