"""Smoke test for the twostage_py extension.

Imports an installed module if available; otherwise loads the library built
by `cargo build -p twostage-python --release`.
"""

import csv
import importlib
import io
import json
import pathlib
import shutil
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("twostage_py")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        built = ROOT / "target" / profile / "libtwostage_py.so"
        if built.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
            shutil.copy(built, tmp / f"twostage_py{suffix}")
            sys.path.insert(0, str(tmp))
            return importlib.import_module("twostage_py")
    sys.exit("twostage_py not found; run `cargo build -p twostage-python --release` first")


def main():
    ts = load()

    # packing routes the budget to the unpriced resource
    x, value = ts.inner_solve([0.5, 0.5], 4.0, 2.0, [3.0, 3.0], 2.0, [10.0, 0.0], 10)
    assert x == [0.0, 2.0] and value == 0.0, (x, value)
    # covering serves the priced resource: nu = 10 / (10 * 0.5), value = -nu * 2 / 2
    x, value = ts.inner_solve([0.5, 0.5], 4.0, 2.0, [3.0, 3.0], 2.0, [0.0, 10.0], 10, covering=True)
    assert x == [0.0, 2.0] and abs(value + 2.0) < 1e-12, (x, value)

    config = {
        "case": "smoke",
        "horizon": 1,
        "seeds": [0],
        "family": {"beta": [0.5], "budget_cap": 2, "capacity_scale": 2, "direction": "packing"},
        "schedule": {"pattern": {"ks": [1], "mu0": 1, "sigma0": 1}},
        "algorithms": [{"kind": "dal"}],
    }
    rows = list(csv.DictReader(io.StringIO(ts.run_config(json.dumps(config)))))
    assert [r["seed"] for r in rows] == ["0", "mean", "std"], rows
    assert float(rows[0]["regret"]) == float(rows[0]["regret"])

    try:
        ts.run_config(json.dumps({**config, "colour": 1}))
    except ValueError:
        pass
    else:
        raise AssertionError("unknown key accepted")

    report, table = ts.run_suite("exp1", horizon=200, seeds=[0, 1])
    header = table.splitlines()[0].split(",")
    assert header == ["algorithm", "stationary", "nonstationary-1", "nonstationary-2", "nonstationary-3"], header
    assert len(table.splitlines()) == 3
    assert report.startswith("algorithm,case,seed,")

    print(f"twostage_py {ts.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
