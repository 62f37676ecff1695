# The analytic accelerator model: DSP/buffer footprint and the roofline
# latency/power of one network across parallelism settings.

from codesign.oracle import dsp_usage, latency_ms, mem_usage, power_w
from codesign.space import HwConfig, arch_to_layers, canonicalize, default_backbone

backbone = default_backbone()
arch = canonicalize([1.0, 0.75, 0.5, 0] * 4, backbone)
layers = arch_to_layers(arch, backbone)
print(f"architecture with 12 active cells lowers to {len(layers)} layers")
print("first cell:", *[f"\n  {l}" for l in layers[2:6]])

mem = 4 * 2**20
print("\nscaling filter parallelism PF (PC=16, PV=8, BW=128 fixed):")
print(f"{'PF':>4} {'DSP':>7} {'buffer KiB':>11} {'latency ms':>11} {'power W':>8}")
for pf in (8, 16, 32, 64, 128):
    hw = HwConfig(pf, 16, 8, 128, mem)
    rep = latency_ms(layers, hw, clock_mhz=200.0, dw=backbone.data_width)
    res = mem_usage(layers, hw, backbone.data_width)
    print(f"{pf:>4} {dsp_usage(hw):>7} {res.mem_used / 1024:>11.1f} "
          f"{rep.latency_ms:>11.3f} {rep.power_w:>8.2f}")

print("\nbandwidth sweep at PF=PC=64, PV=8 (compute capacity fixed):")
for bw in (32, 64, 128, 256):
    hw = HwConfig(64, 64, 8, bw, mem)
    rep = latency_ms(layers, hw, clock_mhz=200.0, dw=backbone.data_width)
    bound = "memory-bound" if rep.power_w < 25 else "mixed"
    print(f"  BW {bw:>3} bits/cycle -> {rep.latency_ms:7.3f} ms, {rep.power_w:6.2f} W ({bound})")

print("\nnote the roofline: once compute dominates, more bandwidth stops helping;")
print("once the engine is starved, more DSPs only raise the idle-corrected power.")
