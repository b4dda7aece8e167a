#!/usr/bin/env python3
"""Multiplier-class certificates for every registered symbol.

Certifies at sigma = empirical sigma* + 0.1 and prints the estimated
constant per symbol.  Pass a JSON parameter object as the only argument
to override the reference set, e.g. '{"mu":1,"nu":2,"kappa":0.5}'.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from korteweg.certify import (GridSpec, certify_multiplier,  # noqa: E402
                              empirical_sigma_star, symbol_registry)
from korteweg.model import MaterialParams, Sector, derive_constants  # noqa: E402


def main():
    if len(sys.argv) > 1:
        p = MaterialParams.from_json(json.loads(sys.argv[1]))
    else:
        p = MaterialParams(1.0, 1.0, 2.0)
    dc = derive_constants(p)
    sigma_star = empirical_sigma_star(p, "l1", dc=dc)
    sec = Sector(min(sigma_star + 0.1, 1.45), 0.0)
    print(f"certifying at sigma = {sec.sigma:.4f} "
          f"(empirical sigma* = {sigma_star:.4f})")
    reg = symbol_registry(p, dc)
    grid = GridSpec(20, 7, 20)
    for name in sorted(reg):
        fn, order, typ = reg[name]
        cert = certify_multiplier(fn, name, order, typ, sec, p, grid=grid)
        print(f"{name:<12} order {order:+5.1f} type {typ}  "
              f"C = {cert.estimated_constant:.4g}")


if __name__ == "__main__":
    main()
