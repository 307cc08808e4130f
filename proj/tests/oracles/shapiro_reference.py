"""Capture Shapiro-Wilk reference values from scipy for the C++ test suite.

Regenerate with:  python3 tests/oracles/shapiro_reference.py > tests/fixtures/shapiro_reference.json
"""
import json

import numpy as np
import scipy
from scipy import stats

CASES = [
    ("normal_10", 101, 10, lambda r, n: r.normal(5.0, 2.0, n)),
    ("uniform_25", 102, 25, lambda r, n: r.uniform(-1.0, 3.0, n)),
    ("student_t3_50", 103, 50, lambda r, n: r.standard_t(3, n)),
    ("lognormal_100", 104, 100, lambda r, n: r.lognormal(0.0, 0.5, n)),
    ("normal_200", 105, 200, lambda r, n: r.normal(-3.0, 0.25, n)),
    ("normal_20", 2018, 20, lambda r, n: r.standard_normal(n)),
    ("exponential_20", 2020, 20, lambda r, n: r.exponential(1.0, n)),
]


def main():
    out = {"generator": f"numpy {np.__version__} default_rng / scipy {scipy.__version__} stats.shapiro",
           "samples": []}
    for name, seed, n, draw in CASES:
        x = draw(np.random.default_rng(seed), n)
        res = stats.shapiro(x)
        out["samples"].append({
            "name": name, "seed": seed, "n": n,
            "values": [float(v) for v in x],
            "w": float(res.statistic), "p": float(res.pvalue),
        })
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
