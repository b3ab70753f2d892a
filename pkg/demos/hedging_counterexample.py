"""A perfect hedge across two repetitions of a quantum test.

Walks through the bundled game end to end: what the prover can win in a
single repetition, what independent play would give across two
repetitions, and the correlated phase-flip strategy that wins exactly
one of the two repetitions with certainty.

Run: python demos/hedging_counterexample.py
"""
from hedgekit import (
    check_dual_feasibility,
    compile_primal,
    outcome_probabilities,
    parallel_game,
    solve,
    threshold_objective,
)
from hedgekit.error_reduction import binomial_tail
from hedgekit.hedging import (
    WIN_PROBABILITY,
    hedging_game,
    hedging_optimal_witness,
    phase_flip_strategy,
)
from hedgekit.witnesses import witness_recursive_snk

print("=" * 72)
print("The hedging counterexample")
print("=" * 72)

game = hedging_game()
print("\nThe test: a maximally entangled question qubit, a one-qubit answer,")
print("and a rank-one winning measurement tilted by pi/8.")
print(f"Game space: {game.spaces.labels}, outcomes: lose/win")

# -- single repetition ---------------------------------------------------------
report = solve(compile_primal(game, game.outcomes[1]), tol=1e-8)
print("\n-- one repetition " + "-" * 50)
print(f"solver optimum   : {report.primal_value:.9f}  ({report.status}, "
      f"{report.iterations} iterations)")
print(f"closed form      : {WIN_PROBABILITY:.9f}  (= cos^2(pi/8))")

witness = hedging_optimal_witness()
feas = check_dual_feasibility(game, game.outcomes[1], witness, tol=1e-9)
print(f"dual witness     : trace {feas.value:.9f}, feasible={feas.feasible}")
print("The witness certifies the optimum from above; the solver meets it from below.")

# -- two repetitions, win at least once ----------------------------------------
doubled = parallel_game(game, 2)
at_least_once = solve(compile_primal(doubled, threshold_objective(game, 2, 1)), tol=1e-8)
independent = binomial_tail(WIN_PROBABILITY, 2, 1)
print("\n-- two repetitions, win at least once " + "-" * 31)
print(f"independent play : {independent:.9f}  (= 1 - (1-p)^2)")
print(f"solver optimum   : {at_least_once.primal_value:.9f}")
print("Correlating the two answers beats independent play all the way to 1.")

# -- the explicit strategy -------------------------------------------------------
probs = dict(zip(doubled.outcome_keys, outcome_probabilities(doubled, phase_flip_strategy())))
print("\n-- the phase-flip strategy " + "-" * 42)
print("Flip the sign of |00> on the two received question qubits:")
for key in sorted(probs):
    label = {0: "lose", 1: "win"}
    print(f"  P[{label[key[0]]}, {label[key[1]]}] = {probs[key]:+.12f}")
print("Exactly one win, with certainty: a perfect hedge.")

# -- but never two wins ----------------------------------------------------------
both = solve(compile_primal(doubled, threshold_objective(game, 2, 2)), tol=1e-8)
power = witness_recursive_snk(witness, game, 2, 2)
feas2 = check_dual_feasibility(doubled, threshold_objective(game, 2, 2), power, 1e-9)
print("\n-- two repetitions, win both " + "-" * 40)
print(f"solver optimum   : {both.primal_value:.9f}")
print(f"tensor witness   : {feas2.value:.9f}  (= p^2, feasible={feas2.feasible})")
print("Winning every repetition obeys the product law; hedging only helps at")
print("intermediate thresholds.")
