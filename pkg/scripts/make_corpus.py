"""Write the random benchmark corpus of .bn files."""

import argparse
from pathlib import Path

from bnpin.generate import bench_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--sizes", type=lambda s: tuple(int(x) for x in s.split(",")), default=None)
    args = ap.parse_args()
    kwargs = {"seed": args.seed}
    if args.sizes:
        kwargs["sizes"] = args.sizes
    for path in bench_corpus(args.out, **kwargs):
        print(path)


if __name__ == "__main__":
    main()
