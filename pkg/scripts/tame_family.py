"""Transport lifts through random tame maps and re-run the closure on the image.

For each seed: close f, carry the lift through phi, check it exactly against
pushforward(f, phi), then close the pushforward directly. Prints one CSV row
per seed and a summary line.
"""
import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass

from superlin import Budget, Stabilized, check_lift_symbolic, pushforward, scalar_closure, tame_transport
from superlin.corpus import FamilyConfig, random_tame, random_wdg_field


@dataclass(frozen=True)
class Config:
    count: int = 100
    first_seed: int = 0
    family: FamilyConfig = FamilyConfig()
    image_budget: Budget = Budget(512, 128, 512)


def run(cfg: Config, out=sys.stdout):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["seed", "n", "phi_generators", "lift_dim", "transported_dim", "valid",
                "image_dim", "image_status", "seconds"])
    ok = 0
    for seed in range(cfg.first_seed, cfg.first_seed + cfg.count):
        t0 = time.perf_counter()
        rng = random.Random(seed)
        f = random_wdg_field(rng, cfg.family)
        phi = random_tame(rng, f.n, cfg.family)
        base = scalar_closure(f)
        moved = tame_transport(base.lift, phi)
        h = pushforward(f, phi)
        valid = check_lift_symbolic(h, moved)
        image = scalar_closure(h, cfg.image_budget)
        image_dim = image.lift.n + image.lift.k if isinstance(image, Stabilized) else ""
        ok += valid and isinstance(image, Stabilized)
        w.writerow([seed, f.n, len(phi.generators), base.lift.n + base.lift.k,
                    moved.n + moved.k, valid, image_dim, image.status,
                    f"{time.perf_counter() - t0:.2f}"])
    print(f"# {ok}/{cfg.count} seeds: transported lift valid and image closure stabilized",
          file=out)
    return ok


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=Config.count)
    p.add_argument("--first-seed", type=int, default=Config.first_seed)
    p.add_argument("--max-generators", type=int, default=Config.image_budget.max_generators)
    a = p.parse_args()
    cfg = Config(a.count, a.first_seed, image_budget=Budget(a.max_generators, 128, 512))
    return 0 if run(cfg) == cfg.count else 1


if __name__ == "__main__":
    sys.exit(main())
