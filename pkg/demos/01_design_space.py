# Walk the joint design space: enumerate hardware configs, count the
# architecture space, sample and encode candidate networks.

import numpy as np

from codesign.space import (
    count_space,
    default_backbone,
    default_hw_domain,
    encode16,
    encode19,
    enumerate_hw_configs,
    random_arch,
    unit_counts,
    CodesignPoint,
)

backbone = default_backbone()
domain = default_hw_domain()

configs = enumerate_hw_configs(domain)
print(f"hardware domain: {len(domain.pf)} PF x {len(domain.pc)} PC x "
      f"{len(domain.pv)} PV x {len(domain.bw)} BW = {len(configs)} configurations")
print("first three:", configs[:3])

print("\narchitecture space, treating every cell as a free 3-way ratio choice:")
print("  ", count_space(backbone, None, "ratio_only"), "= 3^16")
print("joint space:")
print("  ", count_space(backbone, default_hw_domain(), "ratio_only"), "(over 12 billion)")
print("canonical architectures (unit counts 2..4 per block, skips trailing):")
print("  ", count_space(backbone, None, "depth_aware"))

print("\nthree random architectures (16 expansion ratios; 0 = skipped cell):")
for seed in range(3):
    arch = random_arch(seed, backbone)
    print(f"  seed {seed}: ratios {arch.ratios} units/block {unit_counts(arch, backbone)}")

arch = random_arch(7, backbone)
point = CodesignPoint(arch, configs[137])
print("\nencodings consumed by the surrogates:")
print("  16-dim:", encode16(arch))
print("  19-dim:", encode19(point), " (last three are PF, PC, PV)")
