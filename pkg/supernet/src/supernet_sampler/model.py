"""The elastic supernet: one shared parameter set, many runnable sub-networks.

Each cell is a bottleneck (1x1 down, 3x3, 1x1 up) whose middle width is a
slice of the widest kernels, so every expansion ratio shares the same
leading channels. GroupNorm (one group) replaces batch norm: it has no
running statistics, stays deterministic in eval, and its per-channel affine
slices consistently with the convolution weights. A skipped cell is the
identity (or the fixed projection shortcut on a block's first slot, which
also handles stride and channel changes).
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from .encoding import ToyBackbone


class ElasticSupernet(nn.Module):
    def __init__(self, backbone: ToyBackbone):
        super().__init__()
        self.backbone = backbone
        self.stem = nn.Conv2d(backbone.image_channels, backbone.stem_channels, 3, padding=1)
        self.stem_norm = nn.GroupNorm(1, backbone.stem_channels)
        self.cells = nn.ModuleList()
        self.projections = nn.ModuleList()
        c_in = backbone.stem_channels
        for u_max, c_out, stride in zip(
            backbone.units_per_block, backbone.block_channels, backbone.block_strides
        ):
            mid = c_out // 4
            for j in range(u_max):
                cell_in = c_in if j == 0 else c_out
                self.cells.append(
                    nn.ModuleDict(
                        dict(
                            c1=nn.Conv2d(cell_in, mid, 1),
                            n1=nn.GroupNorm(1, mid),
                            c2=nn.Conv2d(mid, mid, 3, padding=1, stride=stride if j == 0 else 1),
                            n2=nn.GroupNorm(1, mid),
                            c3=nn.Conv2d(mid, c_out, 1),
                            n3=nn.GroupNorm(1, c_out),
                        )
                    )
                )
            self.projections.append(nn.Conv2d(c_in, c_out, 1, stride=stride))
            c_in = c_out
        self.classifier = nn.Linear(c_in, backbone.num_classes)

    def forward(self, x: torch.Tensor, ratios) -> torch.Tensor:
        bb = self.backbone
        x = F.relu(self.stem_norm(self.stem(x)))
        cell_idx = 0
        for block, u_max in enumerate(bb.units_per_block):
            for j in range(u_max):
                ratio = ratios[cell_idx]
                cell = self.cells[cell_idx]
                cell_idx += 1
                shortcut = self.projections[block](x) if j == 0 else x
                if ratio == 0.0:
                    x = shortcut
                    continue
                m = max(1, round(ratio * cell["c1"].out_channels))
                h = F.conv2d(x, cell["c1"].weight[:m], cell["c1"].bias[:m])
                h = F.relu(F.group_norm(h, 1, cell["n1"].weight[:m], cell["n1"].bias[:m]))
                h = F.conv2d(
                    h, cell["c2"].weight[:m, :m], cell["c2"].bias[:m],
                    stride=cell["c2"].stride, padding=1,
                )
                h = F.relu(F.group_norm(h, 1, cell["n2"].weight[:m], cell["n2"].bias[:m]))
                h = cell["n3"](F.conv2d(h, cell["c3"].weight[:, :m], cell["c3"].bias))
                x = F.relu(h + shortcut)
        x = F.adaptive_avg_pool2d(x, 1).flatten(1)
        return self.classifier(x)
