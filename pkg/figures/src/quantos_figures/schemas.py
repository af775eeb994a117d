"""CSV schemas mirrored verbatim from the sweep CLI, plus strict readers.

The renderer owns no physics; it trusts the producing CLI and refuses any
file whose header deviates from the published schema.
"""

from __future__ import annotations

import csv
from pathlib import Path

import pandas as pd

FISHER_N = ["N", "t1", "t2", "gamma", "big_gamma", "omega",
            "fisher", "mean_term", "cov_term", "nu", "stable"]
FIT = ["alpha", "two_alpha", "intercept", "window_min", "window_max",
       "r_squared", "saturated_value", "reason"]
PHASE = ["t1", "t2", "gamma", "nu"]
ALPHA_T1 = ["t1", "omega", "alpha", "two_alpha", "r_squared"]
FISHER_OMEGA = ["omega", "N", "fisher", "peak_flag"]
CLASSICAL = ["N", "big_gamma", "delta_e0", "alpha_c_running"]


class SchemaError(Exception):
    """Input table does not match the expected CLI schema."""

    def __init__(self, path, expected, got):
        self.path = str(path)
        self.expected = list(expected)
        self.got = list(got)
        self.missing = [c for c in expected if c not in got]
        if self.missing:
            detail = "missing columns: " + ", ".join(self.missing)
        else:
            detail = (f"column order differs: expected {self.expected}, "
                      f"got {self.got}")
        super().__init__(f"{self.path}: {detail}")


def read_table(path, expected) -> pd.DataFrame:
    """Load a CSV after verifying its header equals ``expected`` exactly."""
    path = Path(path)
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), [])
    if header != list(expected):
        raise SchemaError(path, expected, header)
    df = pd.read_csv(path)
    if "reason" in df.columns:
        df["reason"] = df["reason"].fillna("")
    return df


def manifest_value(csv_path, key: str) -> str:
    """Fetch a resolved-configuration value from the run's manifest.

    Sweep CSVs omit constant parameters; the sibling manifest.txt carries
    them as ``key = value`` lines.
    """
    manifest = Path(csv_path).parent / "manifest.txt"
    if not manifest.exists():
        raise FileNotFoundError(f"{manifest}: manifest required to "
                                f"resolve '{key}' for {csv_path}")
    for line in manifest.read_text().splitlines():
        if "=" in line:
            k, _, v = line.partition("=")
            if k.strip() == key:
                return v.strip()
    raise KeyError(f"{manifest}: no '{key}' entry")
