"""Numeric cross-check of transported lifts at the default integration settings.

Transported lifts are exact, but the transformed systems can carry large
coefficients and trajectories; fixed-step RK4 at the default step may then
miss the tolerance or overflow. This script reports how often.
"""
import argparse
import random
from dataclasses import dataclass

from superlin import pushforward, scalar_closure, tame_transport, verify_lift_numeric
from superlin.corpus import random_tame, random_wdg_field
from superlin.numerics import IntegrationOverflow, random_initial_conditions


@dataclass(frozen=True)
class Config:
    count: int = 100
    t_end: float = 1.0
    steps: int = 1000
    tol: float = 1e-6
    points: int = 5


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=Config.count)
    p.add_argument("--steps", type=int, default=Config.steps)
    a = p.parse_args()
    cfg = Config(a.count, steps=a.steps)
    counts = {"pass": 0, "tolerance": 0, "overflow": 0}
    print("seed,outcome,max_rel_error")
    for seed in range(cfg.count):
        rng = random.Random(seed)
        f = random_wdg_field(rng)
        phi = random_tame(rng, f.n)
        lift = tame_transport(scalar_closure(f).lift, phi)
        h = pushforward(f, phi)
        pts = random_initial_conditions(h.n, cfg.points, seed)
        try:
            rep = verify_lift_numeric(h, lift, pts, cfg.t_end, cfg.steps, cfg.tol)
        except IntegrationOverflow as exc:
            counts["overflow"] += 1
            print(f"{seed},overflow,{exc}")
            continue
        outcome = "pass" if rep.passed else "tolerance"
        counts[outcome] += 1
        print(f"{seed},{outcome},{rep.max_rel_error:.3g}")
    print(f"# {counts}")


if __name__ == "__main__":
    main()
