"""Sample the rank-bounded structure union against C_k for small d and every k."""

import csv
import sys
from dataclasses import dataclass

from _config import parse_config
from blockcoh.kcoherence import conjecture_probe, restricted_bell


@dataclass
class Config:
    """Probe violations for d <= max_d."""

    max_d: int = 4
    trials: int = 500
    seed: int = 0


def main(argv=None):
    cfg = parse_config(Config, argv)
    out = csv.writer(sys.stdout)
    out.writerow(["d", "k", "structures", "trials", "violations", "max_residual"])
    for d in range(1, cfg.max_d + 1):
        for k in range(1, d + 1):
            rep = conjecture_probe(d, k, cfg.trials, cfg.seed)
            assert rep.num_structures == restricted_bell(d, k)
            out.writerow([d, k, rep.num_structures, rep.trials, rep.violations, f"{rep.max_residual:.1e}"])


if __name__ == "__main__":
    main()
