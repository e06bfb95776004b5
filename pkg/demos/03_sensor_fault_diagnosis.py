"""Tell a glitchy range sensor apart from two healthy ones by the variance of
the estimated first derivative."""

import numpy as np

from tvlap import diagnose
from tvlap.experiments import FAULT_CONFIG
from tvlap.simgen import gen_fault_channels

channels = gen_fault_channels(seed=1, n_jumps=5, jump_mag=5.0)
jumps = np.abs(channels[2].x - channels[2].truth) > 2.5
print("channel3 glitch samples:", np.flatnonzero(jumps))

result = diagnose({c.name: c.x for c in channels}, FAULT_CONFIG, ratio=3.0)
for name, d in result.items():
    print("%-9s derivative variance %10.3f %s" % (name, d.variance, "FAULTY" if d.faulty else ""))

# with no glitches nothing is flagged
clean = gen_fault_channels(seed=1, n_jumps=0)
print("clean run flags:", [n for n, d in diagnose({c.name: c.x for c in clean}, FAULT_CONFIG).items() if d.faulty])
