"""End-to-end checks of the sepdiff executable: exit codes, JSON envelopes
against golden files, and path dumps.

usage: cli_tests.py SEPDIFF FIXTURE_DIR [--update]
"""
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"

# name, arguments (fixture names are expanded), expected exit code, compare to golden
CASES = [
    ("classify_bm", ["classify", "@bm"], 0, True),
    ("classify_bessel_gamma1", ["classify", "@bessel_gamma1"], 0, True),
    ("classify_bessel_gamma3", ["classify", "@bessel_gamma3"], 0, True),
    ("separate_sticky_x1", ["separate", "@sticky_g1", "@sticky_g2", "--x0", "1"], 0, True),
    ("separate_sticky_x0", ["separate", "@sticky_g1", "@sticky_g2", "--x0", "0"], 0, True),
    ("separate_bessel", ["separate", "@bessel_gamma1", "@bessel_gamma3", "--x0", "1"], 0, True),
    ("separate_reflected_drift", ["separate", "@reflected_drift", "@reflected_bm", "--x0", "0.5"], 0, True),
    ("separate_identical", ["separate", "@bm", "@bm", "--x0", "0"], 0, True),
    ("nflvr_gbm_finite", ["nflvr", "@gbm", "--horizon", "finite"], 0, True),
    ("nflvr_bm_drift_infinite", ["nflvr", "@bm_drift", "--horizon", "infinite"], 0, True),
    ("nflvr_bm_absorbed_infinite", ["nflvr", "@bm_absorbed", "--horizon", "infinite"], 0, True),
    ("simulate_bm_truncated", ["simulate", "@bm", "--truncate=-3,3", "--cells", "60", "--paths", "500"], 0, True),
    ("validate_bm_small", ["validate", "@bm", "--cells", "40", "--paths", "20000"], 0, True),
    ("malformed_expression", ["classify", "@malformed"], 2, False),
    ("invalid_space", ["classify", "@invalid_space"], 2, False),
    ("missing_file", ["classify", "@does_not_exist"], 2, False),
    ("unknown_flag", ["classify", "@bm", "--bogus"], 2, False),
    ("inconclusive_tail", ["classify", "@log_borderline"], 3, False),
    ("domain_mismatch", ["separate", "@bm", "@bessel_gamma1"], 4, False),
    ("not_lower_bounded", ["nflvr", "@bm"], 5, False),
    ("missing_truncation", ["simulate", "@bm"], 6, False),
    ("validate_biased", ["validate", "@bm", "--cells", "40", "--paths", "20000", "--p-up-bias", "0.05"], 7, False),
]

VOLATILE = {"timestamp"}


def strip(doc):
    return {k: v for k, v in doc.items() if k not in VOLATILE}


def close(a, b, path="$"):
    if isinstance(a, float) or isinstance(b, float):
        if isinstance(a, (int, float)) and isinstance(b, (int, float)):
            if math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12):
                return None
        return f"{path}: {a!r} != {b!r}"
    if isinstance(a, dict) and isinstance(b, dict):
        if list(a) != list(b):
            return f"{path}: keys {list(a)} != {list(b)}"
        for k in a:
            if (err := close(a[k], b[k], f"{path}.{k}")) is not None:
                return err
        return None
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} != {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            if (err := close(x, y, f"{path}[{i}]")) is not None:
                return err
        return None
    return None if a == b else f"{path}: {a!r} != {b!r}"


def run(exe, fixtures, args, env=None):
    argv = [str(fixtures / f"{a[1:]}.toml") if a.startswith("@") else a for a in args]
    return subprocess.run([exe, *argv], capture_output=True, text=True, env=env)


def check_case(exe, fixtures, update, name, args, code, golden):
    proc = run(exe, fixtures, args)
    if proc.returncode != code:
        return f"exit {proc.returncode}, expected {code}\n{proc.stdout}{proc.stderr}"
    if code != 0 and args[-1] == "--bogus":
        return None
    doc = json.loads(proc.stdout)
    if doc["exit_code"] != code:
        return f"envelope exit_code {doc['exit_code']}, expected {code}"
    if code != 0 and not doc.get("error", {}).get("kind"):
        return "missing error kind"
    if not golden:
        return None
    file = GOLDEN / f"{name}.json"
    if update:
        file.write_text(json.dumps(strip(doc), indent=2, ensure_ascii=False) + "\n")
        return None
    return close(strip(doc), json.loads(file.read_text()))


def check_dump(exe, fixtures):
    with tempfile.TemporaryDirectory() as out:
        args = ["simulate", "@bm", "--truncate=-2,2", "--cells", "20", "--paths", "10",
                "--dump", "--out", out, "--dump-count", "3"]
        proc = run(exe, fixtures, args)
        if proc.returncode != 0:
            return f"exit {proc.returncode}"
        files = sorted(Path(out).glob("*.csv"))
        if len(files) != 3:
            return f"{len(files)} dump files, expected 3"
        for f in files:
            lines = f.read_text().splitlines()
            if lines[0] != "state,holding_duration":
                return f"{f.name}: header {lines[0]!r}"
            total = sum(float(l.split(",")[1]) for l in lines[1:])
            if total > 1.0 + 1e-12:
                return f"{f.name}: holding times sum to {total} past the horizon"
    return None


def check_threads(exe, fixtures):
    import os
    args = ["simulate", "@bm", "--truncate=-3,3", "--cells", "30", "--paths", "400"]
    outs = []
    for n in ("1", "3"):
        env = dict(os.environ, SEPDIFF_THREADS=n)
        proc = run(exe, fixtures, args, env)
        outs.append(json.loads(proc.stdout)["payload"])
    return None if outs[0] == outs[1] else "estimates depend on SEPDIFF_THREADS"


def main():
    exe, fixtures = sys.argv[1], Path(sys.argv[2])
    update = "--update" in sys.argv
    failures = 0
    checks = [(c[0], lambda c=c: check_case(exe, fixtures, update, *c)) for c in CASES]
    checks += [("path_dump", lambda: check_dump(exe, fixtures)),
               ("thread_count_invariance", lambda: check_threads(exe, fixtures))]
    for name, fn in checks:
        err = fn()
        print(f"{'PASS' if err is None else 'FAIL'} {name}" + ("" if err is None else f": {err}"))
        failures += err is not None
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
