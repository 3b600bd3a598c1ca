"""
The full blind pipeline on the two structured scenes.

Step 1 estimates similarities from patch distances on the counts themselves
and averages with the optimal weights.  Step 2 re-runs a gentle Gaussian
smoothing pass, but only where the step-1 output is dim — bright pixels
pass through untouched.  Neither step sees the truth; the truth is used
here only for scoring.

Writes before/after PGM previews under demos/out/.
"""

import pathlib
import time

import numpy as np

from owpnf import (
    FilterParams,
    nmise,
    owpnf,
    owpnf_step1,
    ridges_scene,
    sample_poisson,
    spots_scene,
)
from owpnf.imgio import save_image

SIZE = 256
SEED = 3


def main():
    out = pathlib.Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    params = FilterParams()  # 15x15 search window, 9x9 patches, overlap kernel

    for name, truth in (("spots", spots_scene(SIZE, SIZE)),
                        ("ridges", ridges_scene(SIZE, SIZE))):
        counts = sample_poisson(truth, SEED).astype(np.float64)

        t0 = time.perf_counter()
        step1 = owpnf_step1(counts, params).output
        both = owpnf(counts, params)
        dt = time.perf_counter() - t0

        raw_score = nmise(counts, truth).nmise
        s1_score = nmise(step1, truth).nmise
        s2_score = nmise(both.output, truth).nmise
        print(f"{name}: raw NMISE {raw_score:.4f} -> step 1 {s1_score:.4f} "
              f"-> two-step {s2_score:.4f}   ({dt:.1f} s)")

        scale = 255.0 / (1.5 * truth.max())
        save_image(out / f"{name}_noisy.pgm", counts, scale=scale)
        save_image(out / f"{name}_denoised.pgm", both.output, scale=scale)

    print()
    print("Step 2 matters most in the darkest regions, where a single")
    print("photon of shot noise is a large relative error and the patch")
    print("distances behind step 1 are at their least informative.")
    print(f"previews written to {out}/")


if __name__ == "__main__":
    main()
