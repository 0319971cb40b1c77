"""Ability estimation from scratch
==================================

Walks the numerical core end to end on the bundled 20-question
reference run: response curves, item information, the Newton-Raphson
iteration with its per-item table, the standard error, and a
brute-force likelihood grid as a cross-check.
"""

from pathlib import Path

import numpy as np

from irtplace import (
    EstimationConfig,
    ItemParameters,
    estimate_ability,
    grid_search_mle,
    item_information,
    prob_correct,
)
from irtplace.cli import format_trace_table
from irtplace.reference import reference_items, reference_responses

###############################################################################
# Response curves
# ---------------
# Each question is a logistic curve in the latent ability theta: at
# theta = b the learner has even odds, and the discrimination a sets
# how fast the odds move away from the difficulty.

easy, hard = ItemParameters(a=1.0, b=-1.0), ItemParameters(a=1.0, b=1.5)
sharp = ItemParameters(a=2.5, b=0.0)
print("P(correct) at a few abilities:")
print(f"{'theta':>6} {'easy b=-1':>10} {'hard b=1.5':>11} {'sharp a=2.5':>12}")
for theta in (-2.0, -1.0, 0.0, 1.0, 2.0):
    print(
        f"{theta:>6.1f} {prob_correct(theta, easy):>10.4f} "
        f"{prob_correct(theta, hard):>11.4f} {prob_correct(theta, sharp):>12.4f}"
    )

###############################################################################
# Item information
# ----------------
# a^2 P Q peaks exactly at theta = b with height a^2/4: a question
# measures best near its own difficulty, and sharper questions measure
# more.

print("\nInformation peaks (theta = b):")
for item in (easy, hard, sharp):
    print(
        f"  a={item.a:.1f} b={item.b:+.1f}: I(b) = {item_information(item.b, item):.4f}"
        f"  (a^2/4 = {item.a * item.a / 4:.4f})"
    )

###############################################################################
# Newton-Raphson maximum likelihood
# ---------------------------------
# The reference run: 20 questions with difficulties 0.1 ... 2.0, wrong
# answers on 1, 4, 7, 8, 15, 16, 18, 19.  Starting at theta = 1 the
# first update already lands within 0.006 of the final estimate.

responses = reference_responses()
estimate = estimate_ability(responses, EstimationConfig(theta_initial=1.0))

print("\nFirst iteration table:")
print(format_trace_table(estimate.trace[0], responses))

print("\nIterates:", "  ".join(f"{row.theta_s:.6f}" for row in estimate.trace))
print(f"Estimate: theta = {estimate.theta:.6f} ({estimate.status.value})")
print(f"Standard error = {estimate.standard_error:.6f}")

###############################################################################
# Cross-check against a brute-force grid
# --------------------------------------
# Evaluating the log-likelihood on a 1e-3 grid over [-3, 3] and taking
# the argmax must land within one grid step of the Newton estimate.

oracle = grid_search_mle(responses, -3.0, 3.0, 1e-3)
print(f"\nGrid-search argmax = {oracle:.3f}  (Newton {estimate.theta:.6f})")
assert abs(oracle - estimate.theta) < 2e-3

###############################################################################
# Degenerate patterns
# -------------------
# All-correct and all-wrong patterns have no interior maximum; the
# estimator pins the scale bound and flags it instead of raising.

from irtplace import Response

all_wrong = [Response(item=item, u=0) for item in reference_items()]
pinned = estimate_ability(all_wrong)
print(f"\nAll-wrong pattern: theta = {pinned.theta}, status = {pinned.status.value}")

###############################################################################
# Optional: plot the response curves and the log-likelihood
# ----------------------------------------------------------

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
else:
    thetas = np.linspace(-3, 3, 601)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    for item, label in ((easy, "a=1, b=-1"), (hard, "a=1, b=1.5"), (sharp, "a=2.5, b=0")):
        ax1.plot(thetas, [prob_correct(t, item) for t in thetas], label=label)
    ax1.set_xlabel("ability")
    ax1.set_ylabel("P(correct)")
    ax1.set_title("Response curves")
    ax1.legend()

    from irtplace import log_likelihood

    ll = [log_likelihood(t, responses) for t in thetas]
    ax2.plot(thetas, ll)
    ax2.axvline(estimate.theta, linestyle="--", color="tab:red", label="Newton estimate")
    ax2.set_xlabel("ability")
    ax2.set_ylabel("log-likelihood")
    ax2.set_title("Reference-run likelihood")
    ax2.legend()
    fig.tight_layout()
    out = Path(__file__).with_name("demo01_curves.png")
    fig.savefig(out, dpi=120)
    print(f"\nwrote {out}")
