"""Growth of the Lie-derivative orbit on the six-variable sinh encoding.

Prints, for k = 0..K, the dimension of span{f, L_f f, ..., L_f^k f} and the
degree in q1 of the second component of L_f^k f, then the closure's
dimension trail under a few budgets.
"""
import argparse
from dataclasses import dataclass

from superlin import Budget, divergence_profile, parse_system, scalar_closure
from superlin.cli import fixture_text


@dataclass(frozen=True)
class Config:
    kmax: int = 8
    budgets: tuple = (Budget(32, 24, 64), Budget(64, 24, 64), Budget(128, 48, 128))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmax", type=int, default=Config.kmax)
    cfg = Config(p.parse_args().kmax)
    f = parse_system(fixture_text("sinh6", "sinh6.sys"))
    print("k,dim,q1_degree")
    for k, (dim, deg) in enumerate(divergence_profile(f, cfg.kmax, 2)):
        print(f"{k},{dim},{deg}")
    for b in cfg.budgets:
        out = scalar_closure(f, b)
        print(f"# budget {b}: {out.status} ({getattr(out, 'reason', '')}) dims {list(out.dims)}")


if __name__ == "__main__":
    main()
