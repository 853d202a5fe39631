"""Walk through the two-group example: how fairness constraints reshape a ranking.

Six candidates, two groups of three, with nearly identical utilities
(0.82 down to 0.77).  Sorting by utility puts every M-group candidate above
every F-group candidate, so the F group receives far less exposure than its
relevance warrants.  Each fairness notion fixes this differently, at a
different cost in expected utility.
"""

from __future__ import annotations

from fairexposure import (
    PositionBias,
    RankingProblem,
    demographic_parity,
    disparate_impact,
    disparate_treatment,
    evaluate,
    load_jobseeker,
    permutation_matrix,
    prp_ranking,
    solve_problem,
)


def main() -> None:
    items = load_jobseeker()
    problem = RankingProblem(
        items=items, position_bias=PositionBias.log_discount(len(items))
    )
    ids = [item.id for item in items]

    prp = permutation_matrix(prp_ranking(problem))
    unconstrained = solve_problem(problem, [])

    runs = [
        ("sort by utility (PRP)", prp),
        ("unconstrained LP", unconstrained.matrix.entries),
    ]
    for name, constraint in [
        ("demographic parity", demographic_parity(problem, "M", "F")),
        ("disparate treatment", disparate_treatment(problem, "M", "F")),
        ("disparate impact", disparate_impact(problem, "M", "F")),
    ]:
        report = solve_problem(problem, [constraint])
        runs.append((name, report.matrix.entries))

    print(f"items: {', '.join(f'{i.id}({i.utility})' for i in items)}")
    print()
    print(f"{'policy':<24} {'utility':>9} {'DTR':>8} {'DIR':>8} {'CoF':>8}")
    for name, matrix in runs:
        metrics = evaluate(
            matrix, problem, reference=unconstrained.matrix.entries
        )
        print(
            f"{name:<24} {metrics.dcg:>9.4f} {metrics.dtr:>8.4f} "
            f"{metrics.dir:>8.4f} {metrics.cof:>8.4f}"
        )

    print()
    print("marginal rank probabilities under demographic parity:")
    parity = solve_problem(problem, [demographic_parity(problem, "M", "F")])
    entries = parity.matrix.entries
    header = " ".join(f"rank{j + 1:>2}" for j in range(len(items)))
    print(f"{'':>4} {header}")
    for i, item_id in enumerate(ids):
        row = " ".join(
            f"{round(entries[i, j], 9) + 0.0:6.3f}" for j in range(len(items))
        )
        print(f"{item_id:>4} {row}")


if __name__ == "__main__":
    main()
