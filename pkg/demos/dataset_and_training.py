"""Generate the optimal-command dataset and train the command network.

Uses the desk-scale grid (40x40 cells, 4 time-unit horizon) so the whole
run finishes in a couple of minutes; swap in DatagenConfig() defaults
for the full-size sweep.  Artifacts land in the working directory.
"""

import time

import numpy as np

from fitguide import (
    REDUCED_CONFIG,
    TrainConfig,
    forward_batch,
    generate_dataset,
    save_model,
    train,
    write_dataset,
)

t0 = time.time()
data = generate_dataset(REDUCED_CONFIG)
print(f"dataset: {len(data)} samples in {time.time() - t0:.1f} s")
print(f"  range     r in ({data[:, 0].min():.3f}, {data[:, 0].max():.3f})")
print(f"  look      sigma in ({data[:, 1].min():.2e}, {data[:, 1].max():.4f}) rad")
print(f"  time-to-go t in ({data[:, 2].min():.2f}, {data[:, 2].max():.2f})")
print(f"  command   u in ({data[:, 3].min():.3f}, {data[:, 3].max():.3f})")

write_dataset(data, "command_dataset.csv")
print("wrote command_dataset.csv")

t0 = time.time()
model, report = train(data, TrainConfig())
print(f"training: {report.epochs_run} epochs in {time.time() - t0:.0f} s")
print(f"  train MSE {report.final_train_mse:.3e}  val MSE {report.final_val_mse:.3e} (standardized)")
print(f"  same in command units: {report.final_train_mse_raw:.3e} / {report.final_val_mse_raw:.3e}")

save_model(model, "command_model.txt")
print("wrote command_model.txt")

# quick fit inspection on a random slice of the data
rng = np.random.default_rng(0)
idx = rng.choice(len(data), 5)
pred = forward_batch(model, data[idx, :3])
for row, p in zip(data[idx], pred):
    print(f"  (r={row[0]:.3f}, sigma={row[1]:.3f}, t={row[2]:.2f}): u={row[3]:+.4f} nn={p:+.4f}")
