"""
Walk through the weight solver on a handful of small profiles.

A profile is a list of (similarity, variance) pairs — one pair per pixel in
a search window, similarity measured against the window center.  The solver
turns it into convex weights that minimize the bias^2 + variance bound on
the weighted estimate.
"""

import numpy as np

from owpnf import brute_force_weights, mse_bound, optimal_weights, solve_bandwidth


def show(title, rho, var):
    rho = np.asarray(rho, dtype=np.float64)
    var = np.asarray(var, dtype=np.float64)
    w, a = optimal_weights(rho, var)
    w_ref = brute_force_weights(rho, var)
    print(f"--- {title}")
    print(f"    rho      = {np.array2string(rho, precision=3)}")
    print(f"    variance = {np.array2string(var, precision=3)}")
    print(f"    bandwidth a = {a:g}")
    print(f"    weights  = {np.array2string(w, precision=4)}")
    print(f"    bound g(w) = {mse_bound(rho, var, w):.6f}  "
          f"(numerical minimum {mse_bound(rho, var, w_ref):.6f})")
    print()


def main():
    # The textbook case: three pixels, unit variance, similarities 0 / 0.5 / 1.
    # The bandwidth lands at 1.5 and the weights come out 1/2, 1/3, 1/6 —
    # a triangular profile in the similarity.
    show("three pixels, unit variance", [0.0, 0.5, 1.0], [1.0, 1.0, 1.0])

    # Unequal variances tilt the same triangle: the noisier pixel is damped.
    show("two pixels, second one twice as noisy", [0.0, 1.0], [1.0, 2.0])

    # All similarities zero (a perfectly flat neighborhood): the bandwidth
    # escapes to infinity and the solution is plain inverse-variance
    # weighting, i.e. the best linear unbiased average.
    show("flat neighborhood", [0.0, 0.0, 0.0], [1.0, 2.0, 4.0])

    # A wildly dissimilar pixel is cut off entirely — its weight is an exact
    # zero, not a small number.  This is the (a - rho)+ hinge at work.
    show("one outlier pixel", [0.0, 0.2, 50.0], [1.0, 1.0, 1.0])

    # The bandwidth alone, for callers that only need the cut-off point.
    rho = np.array([0.0, 0.5, 1.0, 2.5])
    var = np.ones(4)
    a = solve_bandwidth(rho, var)
    kept = int(np.count_nonzero(rho < a))
    print(f"bandwidth for rho={rho.tolist()} is a={a:g}; "
          f"{kept} of {rho.size} pixels get nonzero weight")


if __name__ == "__main__":
    main()
