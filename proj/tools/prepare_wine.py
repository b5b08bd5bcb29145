#!/usr/bin/env python3
"""Write data/wine.csv (13 features + class label in the last column).

Uses scikit-learn's bundled copy of the UCI Wine data (178 x 13, 3 classes),
which is verbatim from the UCI repository. If scikit-learn is unavailable,
download wine.data from the UCI archive and run:

    python3 tools/prepare_wine.py --from-uci-file wine.data

(wine.data puts the class FIRST; this script reorders it to last.)
"""

import argparse
import csv
import os
import sys


def rows_from_sklearn():
    from sklearn.datasets import load_wine

    bundle = load_wine()
    for features, label in zip(bundle.data, bundle.target):
        yield list(features) + [int(label)]


def rows_from_uci_file(path):
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if not row:
                continue
            yield [float(cell) for cell in row[1:]] + [int(row[0]) - 1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--from-uci-file", help="path to a UCI wine.data file")
    parser.add_argument("--out", default="data/wine.csv")
    args = parser.parse_args()

    rows = list(rows_from_uci_file(args.from_uci_file) if args.from_uci_file
                else rows_from_sklearn())
    if len(rows) != 178 or len(rows[0]) != 14:
        sys.exit(f"unexpected shape: {len(rows)} rows x {len(rows[0])} columns")

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerows(rows)
    print(f"wrote {args.out}: {len(rows)} rows")


if __name__ == "__main__":
    main()
