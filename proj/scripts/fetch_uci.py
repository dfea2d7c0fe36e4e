#!/usr/bin/env python3
"""Fetch the UCI Wisconsin Breast Cancer (original) and Ionosphere data sets.

Writes data/wbc.csv (11 columns: id, 9 attributes, class 2/4, missing "?")
and data/ionosphere.csv (34 attributes, class g/b) in the UCI layout.

The UCI archive is tried first.  When it is unreachable the script falls back
to copies shipped in PyPI packages:

  * WBC: MASS "biopsy" inside the pydataset sdist, which is the 699-row UCI
    file with ids, NA for the missing bare-nuclei values and benign/malignant
    class names.  Written back in the UCI layout ("?", 2/4).
  * Ionosphere: Orange/tests/datasets/ionosphere.tab from the Orange3 wheel,
    the UCI file verbatim.

Orange's breast-cancer-wisconsin.tab is not used: it stores v - 1 + u rounded
to two decimals, which cannot be decoded exactly.
"""
import argparse
import csv
import glob
import io
import os
import subprocess
import sys
import tarfile
import tempfile
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases/"
WBC_URL = UCI + "breast-cancer-wisconsin/breast-cancer-wisconsin.data"
IONO_URL = UCI + "ionosphere/ionosphere.data"


def try_download(url):
    try:
        with urllib.request.urlopen(url, timeout=20) as r:
            return r.read().decode()
    except Exception as exc:  # noqa: BLE001
        print(f"  {url}: {exc}", file=sys.stderr)
        return None


def pip_download(package):
    tmp = tempfile.mkdtemp()
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                    "-q", "-d", tmp, package], check=True)
    return tmp


def orange_ionosphere():
    wheel = glob.glob(os.path.join(pip_download("Orange3"), "*.whl"))[0]
    return zipfile.ZipFile(wheel).read("Orange/tests/datasets/ionosphere.tab").decode()


def mass_biopsy():
    sdist = glob.glob(os.path.join(pip_download("pydataset"), "pydataset-*.tar.gz"))[0]
    with tarfile.open(sdist) as outer:
        inner = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        with tarfile.open(fileobj=outer.extractfile(inner)) as res:
            return res.extractfile("resources/rdata/csv/MASS/biopsy.csv").read().decode()


def biopsy_to_uci(text):
    out = []
    for r in list(csv.reader(io.StringIO(text)))[1:]:
        vals = ["?" if v == "NA" else v for v in r[2:11]]
        out.append(",".join([r[1]] + vals + ["2" if r[11] == "benign" else "4"]))
    return "\n".join(out) + "\n"


def tab_rows(text):
    lines = text.splitlines()[3:]
    return [l.split("\t") for l in lines if l.strip()]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    wbc = try_download(WBC_URL)
    iono = try_download(IONO_URL)
    if wbc is None:
        print("WBC: falling back to MASS biopsy from pydataset", file=sys.stderr)
        wbc = biopsy_to_uci(mass_biopsy())
    if iono is None:
        print("Ionosphere: falling back to the Orange3 wheel", file=sys.stderr)
        iono = "\n".join(",".join(r) for r in tab_rows(orange_ionosphere())) + "\n"

    with open(os.path.join(args.out, "wbc.csv"), "w") as f:
        f.write(wbc)
    with open(os.path.join(args.out, "ionosphere.csv"), "w") as f:
        f.write(iono)
    print(f"wrote {args.out}/wbc.csv and {args.out}/ionosphere.csv")


if __name__ == "__main__":
    main()
