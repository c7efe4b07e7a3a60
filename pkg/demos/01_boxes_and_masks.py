#!/usr/bin/env python3
"""Tour of the box and mask primitives.

The interesting bit is the difference between IoU and IoF on an occluded
object: a half-visible detection keeps a perfect IoF against the remembered
full box even though IoU collapses to 0.5.
"""

import numpy as np

from ibgs import Box, RleMask, iof, iou, mean_box, union_masks

full_bike = Box(100, 100, 160, 130)
visible_half = Box(130, 100, 160, 130)  # someone stands in front of the left half

print("full vs full   iou =", iou(full_bike, full_bike))
print("half vs full   iou =", iou(visible_half, full_bike))
print("half vs full   iof =", iof(visible_half, full_bike))
print()

# a trajectory mean is just the coordinate-wise average
history = [Box(10 + d, 10, 30 + d, 30) for d in (0, 1, 2, 3)]
print("mean box over a slightly drifting trajectory:", mean_box(history).to_list())
print()

# masks are row-major run-length encodings, background run first
grid = np.zeros((4, 6), dtype=bool)
grid[1:3, 1:4] = True
mask = RleMask.from_array(grid)
print("counts:", mask.counts)
print("decoded:\n", mask.decode().astype(int))

other = np.zeros((4, 6), dtype=bool)
other[0, 5] = True
merged = union_masks([mask, RleMask.from_array(other)], 4, 6)
print("union foreground pixels:", merged.foreground_pixels())
