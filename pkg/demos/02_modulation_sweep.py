#!/usr/bin/env python3
"""How fast may the longitudinal field breathe before the NOT gate breaks?

The field magnitude is modulated as cos(delta * t).  At delta = 0 the pulse
is perfect; as delta grows, the accumulated detuning spoils the transfer.
This script sweeps delta over four decades, writes the fidelity table as
CSV, and bisects for the largest delta that still keeps M3 >= 0.99.
"""

import pathlib

import numpy as np

from spingates import (
    GateKind,
    Scale,
    SweepSpec,
    emit_csv,
    find_threshold,
    from_mhz,
    run_sweep,
    standard_not_params,
    to_mhz,
)

HERE = pathlib.Path(__file__).resolve().parent
params = standard_not_params()

# -- 1. global view: log grid over [1e-5, 1e-1] ------------------------------

wide = SweepSpec(gate=GateKind.NOT, params=params,
                 delta_min=from_mhz(1e-5), delta_max=from_mhz(1e-1),
                 n_points=81, scale=Scale.LOG)
table = run_sweep(wide)
emit_csv(table, str(HERE / "not_sweep_global.csv"))
print("global sweep written to not_sweep_global.csv")
print(f"  M3 at delta = 1e-5: {table.m3[0]:.8f}")
print(f"  M3 at delta = 1e-1: {table.m3[-1]:.8f}")

# the collapse is not monotone: the tail oscillates, which is why the
# threshold search verifies its bracket instead of assuming monotonicity
tail = table.m3[table.deltas > from_mhz(1e-3)]
print(f"  oscillatory tail: {np.sum(np.diff(tail) > 0)} upward wiggles "
      f"out of {len(tail) - 1} tail intervals")

# -- 2. local view: linear grid around the knee ------------------------------

local = SweepSpec(gate=GateKind.NOT, params=params,
                  delta_min=0.0, delta_max=from_mhz(1.5e-3), n_points=151)
emit_csv(run_sweep(local), str(HERE / "not_sweep_local.csv"))
print("local sweep written to not_sweep_local.csv")

# -- 3. the safety threshold --------------------------------------------------

spec = SweepSpec(gate=GateKind.NOT, params=params, delta_min=from_mhz(1e-4),
                 delta_max=from_mhz(1e-2), fidelity_threshold=0.99)
delta_star = find_threshold(spec)
print(f"largest delta with M3 >= 0.99: {to_mhz(delta_star):.4e} (2pi MHz units), "
      f"i.e. {delta_star:.4e} rad/us")
print("  -> a well-defined NOT survives modulation frequencies up to a few")
print("     times 1e-4 of the quoted-unit scale; by 1e-3 it is already degrading")
