#!/usr/bin/env python3
"""Print the secure-distance comparison and the optimized mu schedule.

Usage: python scripts/secure_distance_report.py [--alpha 0.2]
"""

import argparse

from qutrit_qkd.optimize import optimize_mu, secure_distance
from qutrit_qkd.rates import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.2, help="fiber attenuation, dB/km")
    args = ap.parse_args()

    params = SystemParams(alpha_db_per_km=args.alpha)
    print(f"alpha = {args.alpha} dB/km, gamma_b = {params.gamma_b}, "
          f"eta = {params.eta}, p_d = {params.p_d}, q_opt = {params.q_opt}")
    print()

    distances = {}
    for proto in ("bb84", "qutrit"):
        distances[proto] = secure_distance(proto, params)
        print(f"{proto:7s} secure distance: {distances[proto]:6.1f} km")
    print(f"qutrit advantage: {distances['qutrit'] - distances['bb84']:.1f} km")
    print()

    print(f"{'l (km)':>7s} {'mu* bb84':>10s} {'K bb84':>12s} {'mu* qutrit':>11s} {'K qutrit':>12s}")
    for l in range(0, int(distances["qutrit"]) + 5, 5):
        b = optimize_mu("bb84", params, float(l))
        q = optimize_mu("qutrit", params, float(l))
        print(f"{l:7d} {b.mu_opt:10.4f} {b.k_opt:12.4e} {q.mu_opt:11.4f} {q.k_opt:12.4e}")


if __name__ == "__main__":
    main()
