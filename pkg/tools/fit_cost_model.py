"""Fit the shipped default cost model from the reference timings.

Four timing observations of batched runs on a cloud-accessed device are
used, as (pairs, batches, shots, settings, seconds):

  * a 400-point landscape scan at 10,000 shots: 16 batches on 25 pairs
    took 220 s; the single-pair equivalent (400 batches) took 3960 s;
  * a 50-iteration SPSA optimisation at 1,000 shots (3 evaluations per
    iteration, i.e. 150 batches): 245 s on one pair, 420 s on 25 pairs.

The fitted parameters are outputs of the nonnegative least-squares
calibration, not hand-picked values.

Run from the repository root:  python tools/fit_cost_model.py
"""

from pathlib import Path

from parvqe.executor import calibrate_cost_model, save_cost_model

OUT = Path(__file__).resolve().parents[1] / "src" / "parvqe" / "data" / "default_cost_model.json"

OBSERVATIONS = [
    (25, 16, 10_000, 2, 220.0),
    (1, 400, 10_000, 2, 3960.0),
    (1, 150, 1000, 2, 245.0),
    (25, 150, 1000, 2, 420.0),
]


def main() -> None:
    model, residuals = calibrate_cost_model(OBSERVATIONS)
    print(f"t_base={model.t_base:.6f} beta={model.beta:.6f} tau={model.tau:.6e}")
    print("residuals (predicted - observed seconds):",
          [round(float(r), 2) for r in residuals])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    save_cost_model(model, OUT)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
