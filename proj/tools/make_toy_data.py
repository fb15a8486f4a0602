#!/usr/bin/env python3
# Copyright 2026 The GazeBench Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled toy dataset under data/toy/.

Five stimuli at two native resolutions, two observers each, synthetic
decoder outputs centred on the first observer's fixations, placeholder
images and one feature bundle. Output is deterministic.
"""

import json
import math
import os
import random
import struct
import zlib

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "data", "toy")

# (id, width, height, task, extra fields, ppd)
STIMULI = [
    ("fv-street", 1024, 768, "free-view", {}, 32.0),
    ("fv-kitchen", 800, 600, "free-view", {}, 25.0),
    ("search-cup", 1024, 768, "search",
     {"target_name": "cup", "target_box": [560, 300, 680, 420]}, 32.0),
    ("search-dog", 800, 600, "search",
     {"target_name": "dog", "target_box": [120, 380, 300, 540]}, 25.0),
    ("vqa-clock", 1024, 768, "vqa",
     {"question": "What time does the clock on the wall show?",
      "observer_answer": "ten past two"}, 32.0),
]

# Per stimulus: fixations of observer A as (x, y, ms, explanation) in native
# pixels. Observer B revisits the same regions with small offsets and
# paraphrased explanations. Regions sit far apart so MeanShift keeps them
# separate.
SCENES = {
    "fv-street": [
        (200, 180, 260, "a tall brick building with many small windows"),
        (820, 200, 310, "a white car parked beside the narrow street"),
        (210, 600, 240, "a woman walking a small brown dog"),
        (800, 580, 280, "a green bicycle leaning against a metal fence"),
        (205, 190, 220, "the tall brick building with many windows again"),
    ],
    "fv-kitchen": [
        (150, 140, 300, "a wooden shelf holding white plates and bowls"),
        (640, 150, 270, "a silver kettle sitting on the black stove"),
        (160, 460, 250, "a bowl of ripe yellow bananas on the counter"),
        (630, 470, 330, "a small potted plant near the kitchen window"),
    ],
    "search-cup": [
        (180, 160, 240, "a stack of old books on a wooden table"),
        (600, 340, 350, "a white ceramic cup filled with hot coffee"),
        (880, 600, 260, "a grey laptop with an open lid"),
        (610, 350, 300, "the white ceramic cup filled with hot coffee again"),
    ],
    "search-dog": [
        (620, 140, 250, "a blue sky with a few white clouds"),
        (200, 460, 340, "a brown dog lying on the green grass"),
        (640, 470, 270, "a red ball resting near the garden fence"),
        (210, 450, 290, "the brown dog resting its head on paws"),
    ],
    "vqa-clock": [
        (512, 150, 330, "a round clock with black hands on the wall"),
        (200, 560, 240, "a grey sofa with two striped cushions"),
        (830, 560, 260, "a tall lamp standing in the corner of the room"),
        (520, 160, 310, "the round clock with black hands showing ten past two"),
    ],
}

PARAPHRASE = {
    "a ": "one ",
    "the ": "that ",
}


def paraphrase(text):
    # Swaps the leading article so the two observers differ in wording but
    # stay lexically consistent within each region.
    for old, new in PARAPHRASE.items():
        if text.startswith(old):
            return new + text[len(old):]
    return text


def scanpaths(sid):
    a = SCENES[sid]
    obs_a = [{"x": x, "y": y, "dur_ms": ms, "exp": e} for x, y, ms, e in a]
    obs_b = []
    for i, (x, y, ms, e) in enumerate(a):
        obs_b.append({"x": x + (7 if i % 2 else -6), "y": y + (5 if i % 3 else -4),
                      "dur_ms": ms + 20 * ((i % 3) - 1), "exp": paraphrase(e)})
    return [
        {"stimulus_id": sid, "observer_id": "obs-a", "fixations": obs_a},
        {"stimulus_id": sid, "observer_id": "obs-b", "fixations": obs_b},
    ]


def png_bytes(width, height, seed):
    rnd = random.Random(seed)
    blobs = [(rnd.uniform(0, width), rnd.uniform(0, height),
              rnd.uniform(60, 160), [rnd.randrange(256) for _ in range(3)])
             for _ in range(6)]
    rows = []
    for y in range(height):
        row = bytearray([0])
        for x in range(width):
            px = [x * 255 // width, y * 255 // height, 128]
            for bx, by, br, col in blobs:
                if (x - bx) ** 2 + (y - by) ** 2 < br * br:
                    px = col
                    break
            row.extend(px)
        rows.append(bytes(row))
    raw = b"".join(rows)

    def chunk(kind, data):
        c = kind + data
        return struct.pack(">I", len(data)) + c + struct.pack(
            ">I", zlib.crc32(c) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) +
            chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))


def decoder(sid, width, height):
    rows, cols = 6, 8
    steps = []
    fix = SCENES[sid]
    spread = 0.4
    for k, (x, y, ms, _) in enumerate(fix):
        cx, cy = x / width * cols, y / height * rows
        logits = []
        for r in range(rows):
            for c in range(cols):
                d2 = (c + 0.5 - cx) ** 2 + (r + 0.5 - cy) ** 2
                logits.append(round(-d2 / (2 * spread * spread), 4))
        end = 1.0 if k == len(fix) - 1 else round(0.05 + 0.1 * k, 2)
        steps.append({"map": logits, "mu": round(math.log(ms), 4),
                      "sigma2": 0.25, "end_prob": end})
    return {"schema": "gazebench-decoder-v1", "stimulus_id": sid,
            "image_size": [width, height], "grid": [rows, cols],
            "kind": "similarity", "temperature": 1.0, "steps": steps}


def bundle():
    rnd = random.Random(7)
    k, d = 3, 4

    def vec():
        return [round(rnd.gauss(0, 1), 4) for _ in range(d)]

    return {"r": [vec() for _ in range(k)], "g": [vec() for _ in range(k)],
            "e_p": [vec() for _ in range(k)]}


def main():
    os.makedirs(os.path.join(OUT, "decoders"), exist_ok=True)
    os.makedirs(os.path.join(OUT, "images"), exist_ok=True)
    stimuli, paths = [], []
    for i, (sid, w, h, task, extra, ppd) in enumerate(STIMULI):
        rec = {"id": sid, "width": w, "height": h, "task": task,
               "pixels_per_degree": ppd, "image": "images/%s.png" % sid}
        rec.update(extra)
        stimuli.append(rec)
        paths.extend(scanpaths(sid))
        with open(os.path.join(OUT, "images", sid + ".png"), "wb") as f:
            f.write(png_bytes(w, h, i))
        with open(os.path.join(OUT, "decoders", sid + ".json"), "w") as f:
            json.dump(decoder(sid, w, h), f, indent=1)
            f.write("\n")
    ds = {"schema": "gazebench-v1", "name": "toy", "split": "test",
          "stimuli": stimuli, "scanpaths": paths}
    with open(os.path.join(OUT, "truth.json"), "w") as f:
        json.dump(ds, f, indent=1)
        f.write("\n")
    with open(os.path.join(OUT, "features.json"), "w") as f:
        json.dump(bundle(), f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
