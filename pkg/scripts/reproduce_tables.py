"""Print every reference table next to the computed BDDF values."""

import argparse

from bddf.checks import REFERENCE_TABLES, table_checks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", help="restrict to one table key, e.g. gamma")
    args = ap.parse_args()
    worst_total = 0
    for table in REFERENCE_TABLES:
        if args.only and table.key != args.only:
            continue
        rows = list(table_checks(table))
        fails = sum(not c.passed for c in rows)
        worst_total += fails
        print(f"== {table.key} {dict(table.params)}  ({len(rows) - fails}/{len(rows)} within tolerance)")
        for c in rows:
            mark = "ok " if c.passed else "OFF"
            print(f"  {mark} {c.name.split()[-1]:>10}  ref={c.expected:<12.6g} got={c.got:<12.6g} "
                  f"diff={c.got - c.expected:+.2e}")
    print(f"\n{worst_total} entries outside tolerance")


if __name__ == "__main__":
    main()
