#!/usr/bin/env python3
"""The background-model lifecycle on the departure scenario.

A parked car is absorbed into the model at the first periodic update; when
it drives away the next update evicts it, so no ghost foreground is left at
the empty parking spot.
"""

from ibgs import Config, Pipeline, build_scenario, generate, parse_stream

cfg = Config()
result = generate(build_scenario("departure", cfg))
header, frames = parse_stream(result.stream_bytes())
pipe = Pipeline(header, cfg)

tail_pixels = 0
n_frames = result.manifest["frames"]
for frame in frames:
    out = pipe.process(frame)
    if out.model_updated:
        labels = [e.label for e in pipe.model.snapshot()]
        print(f"frame {frame.frame_index:3d}: model updated -> entries {labels}")
    if out.result.foreground and frame.frame_index % 10 == 0:
        fg = [i.detection.label for i in out.result.foreground]
        print(f"frame {frame.frame_index:3d}: foreground {fg}")
    if frame.frame_index >= n_frames - 30:
        tail_pixels += out.result.mask.foreground_pixels()

print()
print(f"ghost check: foreground pixels over the last 30 frames = {tail_pixels}")
print("(the spot where the car used to be stays background)")
