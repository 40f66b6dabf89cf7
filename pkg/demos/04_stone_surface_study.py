"""Full study of the Sope Creek stone photographs.

Needs the transcribed fixture (see data/sope_creek/README.md). Runs the
whole pipeline: registration on the sphere, the planarity test, per-scene
influence diagnostics, the greedy reduction, and the plot-ready CSV exports.
"""

import os
import sys
from pathlib import Path

from opshape.pipeline import StudyConfig, emit_outputs, run_analysis

root = Path(__file__).resolve().parents[1]
fixture = Path(os.environ.get("OPSHAPE_SOPE_CREEK", root / "data" / "sope_creek" / "sope_creek.csv"))
if not fixture.is_file():
    sys.exit(
        f"fixture not found at {fixture}; transcribe it per data/sope_creek/README.md "
        "or set OPSHAPE_SOPE_CREEK"
    )

report = run_analysis(StudyConfig(input_path=fixture))
full, reduced, trace = report.full, report.reduced, report.trace


def show(label, s):
    print(
        f"{label}: n={s.n}  tS={s.total_variance:.4f}  se={s.se:.4f}  "
        f"CI=[{s.ci[0]:.3f}, {s.ci[1]:.3f}]  T={s.t_stat:.3f}  "
        f"p={s.p_chisq:.4f}  reject={'yes' if s.reject_ci else 'no'}"
    )


show("full sample   ", full)
print(f"greedy removal: {list(trace.removed_scene_ids)} ({trace.stopped_reason})")
show("reduced sample", reduced)

print("\nmost influential scenes (leave-one-out, by CI lower endpoint):")
for row in sorted(report.loo, key=lambda r: r.ci_lower)[:5]:
    print(f"  scene {row.scene_id:>3}: tS={row.total_variance:.4f} ci_lower={row.ci_lower:+.4f}")

out = root / "out" / "sope_creek"
paths = emit_outputs(report, out)
print(f"\nwrote {len(paths)} files to {out}")
