"""Run the homogeneous scan and print families, counts and anomaly classes."""
import argparse
import time

from nkflag.reports import scan_report
from nkflag.scan import ScanConfig, homogeneous_scan


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=int, default=9)
    p.add_argument("--l-range", type=float, default=2.0)
    p.add_argument("--l-step", type=float, default=0.5)
    p.add_argument("--starts", type=int, default=4, help="separated grid minima refined per angle point")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="write the JSON report here")
    a = p.parse_args()
    cfg = ScanConfig(angle_points=a.grid, l_min=-a.l_range, l_max=a.l_range, l_step=a.l_step,
                     starts_per_point=a.starts, workers=a.workers)
    t0 = time.perf_counter()
    rep = homogeneous_scan(cfg)
    print(f"{rep.refined} refinements in {time.perf_counter() - t0:.1f} s")
    print("families:", rep.counts())
    for w in rep.warnings:
        print("warning:", w)
    for c in rep.anomaly_classes():
        print(f"anomaly class: signature {c['signature']} angles {c['angles']} |h| {c['sff_norm']} x{c['count']}")
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(scan_report(rep).to_json())


if __name__ == "__main__":
    main()
