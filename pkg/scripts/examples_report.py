"""Write JSON reports for the three homogeneous examples and print a short table."""
import argparse
import json
from pathlib import Path

from nkflag.reports import EXAMPLES, example_report


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="example_reports")
    a = p.parse_args()
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in EXAMPLES:
        rep = example_report(name)
        (out / f"{name}.json").write_text(rep.to_json(), encoding="utf-8")
        d = json.loads(rep.to_json())["data"]
        print(f"{name:6s} orbit type {d['orbit_type']['label']:11s} fiber ratio {d['fiber_ratio']:.6f} "
              f"twistor {d['twistor']['label']:13s} failed checks {sum(c.status == 'fail' for c in rep.checks)}")


if __name__ == "__main__":
    main()
