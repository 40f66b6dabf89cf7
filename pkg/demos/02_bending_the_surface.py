"""How the planarity test reacts as the scene leaves its plane.

The generator keeps the four frame landmarks exactly coplanar and lifts the
remaining landmark out of the plane by `delta`. With noiseless cameras this
sweeps the test from exact acceptance to clear rejection; a final run shows
that pixel noise alone also registers as direction dispersion, which is why
real studies care about the size of tS and not just the verdict.
"""

from opshape.directional import coplanarity_test
from opshape.geometry import FrameSpec
from opshape.pipeline import register_scenes
from opshape.synth import synthesize_views

SPEC = FrameSpec(frame_labels=(1, 2, 4, 3), remaining_labels=(5,))


def study(delta, noise):
    views = synthesize_views(k=5, cameras=20, seed=42, delta=delta, noise=noise)
    sample, _, _ = register_scenes(views, SPEC)
    return coplanarity_test(sample, alpha=0.05)


print("delta    tS          se          95% CI lower   T = n*tS   decision (CI)")
for delta in (0.0, 0.005, 0.01, 0.02, 0.05, 0.1):
    s = study(delta, noise=0.0)
    decision = "reject" if s.reject_ci else "keep"
    print(
        f"{delta:5.3f}  {s.total_variance:10.2e}  {s.se:10.2e}"
        f"  {s.ci[0]:12.2e}  {s.t_stat:9.3f}   {decision}"
    )

print()
s = study(delta=0.0, noise=0.002)
print(
    f"flat scene, 0.002 pixel noise: tS={s.total_variance:.2e}, "
    f"CI lower={s.ci[0]:.2e} -> the CI calibration flags the noise floor itself."
)
print(
    f"Its chi-square companion stays conservative there (T={s.t_stat:.3f}, "
    f"p={s.p_chisq:.3f}): n*tS only grows past the reference line once the"
)
print("departure is real, as in the delta sweep above.")
