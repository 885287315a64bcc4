from typing import Iterable
import argparse
import json

import structlog
from tqdm import tqdm

from kcone.cone import can_blowdown_to_orbit, validate
from kcone.construct import DEFAULT_SEED, Family, example_family, obstructed_family
from kcone.errors import KConeError
from kcone.euler import verify_global_identity
from kcone.exactnum import DISCRIMINANT, is_delzant_pair
from kcone.reeb import choose_transverse_circle

logger = structlog.get_logger("kcone.sweep")


def families(which: str, ks: Iterable[int], seed: int, d: int):
    for k in ks:
        if which in ("example", "both"):
            yield "example", k, lambda k=k: example_family(k, d)
        if which in ("obstructed", "both"):
            yield "obstructed", k, lambda k=k: obstructed_family(k, seed, d)


def check(family: Family, k: int) -> dict:
    cone, reeb = family.cone, family.reeb
    good = validate(cone).is_good
    # faces 1..k are the chain between the two flats
    obstructed = all(
        not can_blowdown_to_orbit(cone, i) and not is_delzant_pair(cone[i - 1], cone[i + 1])
        for i in range(1, k + 1)
    )
    report = verify_global_identity(cone, reeb, choose_transverse_circle(cone, reeb))
    return {
        "good": good,
        "obstructed": obstructed,
        "euler": report.ok,
        "lhs": str(report.lhs),
        "ok": good and obstructed and report.ok,
    }


def sweep(which: str, ks: Iterable[int], seed: int = DEFAULT_SEED, d: int = DISCRIMINANT) -> list[dict]:
    rows = []
    for name, k, build in tqdm(list(families(which, ks, seed, d))):
        row = {"family": name, "k": k}
        try:
            family = build()
            row |= {"name": family.name, "faces": len(family.cone), **check(family, k)}
        except KConeError as exc:
            logger.warning("sweep failure", family=name, k=k, error=str(exc))
            row |= {"error": str(exc), "ok": False}
        rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser("kcone-sweep", description="check the constructed families")
    parser.add_argument("--family", choices=["example", "obstructed", "both"], default="both")
    parser.add_argument("--kmin", type=int, default=2)
    parser.add_argument("--kmax", type=int, default=8)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--d", type=int, default=DISCRIMINANT)
    args = parser.parse_args()

    rows = sweep(args.family, range(args.kmin, args.kmax + 1), args.seed, args.d)
    for row in rows:
        print(json.dumps(row))
