"""Turn a dataclass of defaults into command-line flags."""

import argparse
from dataclasses import fields


def parse_config(cls, argv=None):
    p = argparse.ArgumentParser(description=cls.__doc__)
    for f in fields(cls):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    return cls(**vars(p.parse_args(argv)))
