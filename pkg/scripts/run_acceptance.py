"""Print one PASS/FAIL line per acceptance criterion (no pytest needed)."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import test_acceptance as A  # noqa: E402

CRITERIA = [A.crit1, A.crit2, A.crit3, A.crit4, A.crit5, A.crit6, A.crit7, A.crit8, A.crit9, A.crit10, A.crit11]


def main(argv):
    wanted = {int(a) for a in argv} or set(range(1, 12))
    for num, crit in enumerate(CRITERIA, start=1):
        if num in wanted:
            crit()
            print(A.RESULTS[num], flush=True)
    return 0 if all(line.startswith("[PASS]") for line in A.RESULTS.values()) else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
