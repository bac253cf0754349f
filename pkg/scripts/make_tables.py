"""Write gr_n K_q tables (formula vs computed totals) as JSON, one file per setting.

    python3 scripts/make_tables.py --out tables/
"""

import argparse
import contextlib
import io
import json
from pathlib import Path

from milnor_syntomic.cli import main as cli_main

SETTINGS = [
    ("e1_q2_case_v", ["--e", "1", "--case", "v", "--n", "2", "--n-max", "6"]),
    ("e2_q2_case_vi", ["--e", "2", "--case", "vi", "--n", "1", "--n-max", "10"]),
    ("p5_case_vii", ["--case", "vii", "--n", "1", "--n-max", "26"]),
    ("p3_case_vii", ["--p", "3", "--case", "vii", "--n", "1", "--n-max", "12"]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("tables"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, flags in SETTINGS:
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli_main(["table", *flags, "--format", "json"])
        (args.out / f"{name}.json").write_text(buf.getvalue())
        rows = json.loads(buf.getvalue()).get("rows", [])
        print(f"{name}: {len(rows)} rows, exit {code}")


if __name__ == "__main__":
    main()
