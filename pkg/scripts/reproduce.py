"""Print the worked-example table; exit status 0 iff every row passes."""

import sys
from dataclasses import dataclass

from _config import parse_config
from blockcoh.demo import format_table, run_demo


@dataclass
class Config:
    """Worked-example reproduction."""

    seed: int = 0
    restarts: int = 32


def main(argv=None):
    cfg = parse_config(Config, argv)
    rows = run_demo(cfg.seed, cfg.restarts)
    print(format_table(rows))
    return 0 if all(r.passed for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
