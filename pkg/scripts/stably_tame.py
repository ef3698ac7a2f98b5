"""Carry lifts through sampled stably tame witnesses with one extra variable."""
import argparse
import random
import sys
from dataclasses import dataclass

from superlin import check_lift_symbolic, scalar_closure, stably_tame_transport
from superlin.automorphism import pushforward_maps
from superlin.corpus import FamilyConfig, random_stably_tame, random_wdg_field


@dataclass(frozen=True)
class Config:
    count: int = 25
    max_degree: int = 2
    family: FamilyConfig = FamilyConfig(max_n=3, max_degree=2)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=Config.count)
    cfg = Config(p.parse_args().count)
    ok = 0
    print("seed,n,psi,lift_dim,valid")
    for seed in range(cfg.count):
        rng = random.Random(seed)
        f = random_wdg_field(rng, cfg.family)
        w = random_stably_tame(rng, f.n, cfg.max_degree)
        lift = stably_tame_transport(scalar_closure(f).lift, w)
        valid = check_lift_symbolic(pushforward_maps(f, w.psi, w.psi_inverse), lift)
        ok += valid
        psi = " ; ".join(c.render() for c in w.psi.components)
        print(f'{seed},{f.n},"{psi}",{lift.n + lift.k},{valid}')
    print(f"# {ok}/{cfg.count} valid")
    return 0 if ok == cfg.count else 1


if __name__ == "__main__":
    sys.exit(main())
