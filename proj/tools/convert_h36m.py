#!/usr/bin/env python3
# Copyright 2026 The synthpose Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Convert preprocessed Human3.6M arrays into synthpose pose files.

No dataset ships with this repository. Obtain Human3.6M under its licence,
then produce two .npz archives with the usual 17-joint preprocessing:

  --poses-2d  npz with `positions_2d`: {subject: {action: [cam0..cam3]}},
              each (frames, 17, 2) in pixels (x right, y down)
  --poses-3d  npz with `positions_3d_cam`: same nesting, each (frames, 17, 3)
              in metres in the camera frame (x right, y down, z forward)

Joint order must match the built-in h36m17 layout:
  pelvis, right_hip, right_knee, right_ankle, left_hip, left_knee,
  left_ankle, spine, thorax, nose, head_top, left_shoulder, left_elbow,
  left_wrist, right_shoulder, right_elbow, right_wrist

Outputs in --out (the layout SYNTHPOSE_H36M_DIR expects):
  train_2d.jsonl     subjects S1 S5 S6 S7 S8
  test_2d.jsonl      subjects S9 S11
  test_3d.jsonl      matching 3D, y up and z toward the camera
  seeds.json         annotated seeds for the frames in --seed-frames, with
                     front/behind signs taken from the 3D ground truth
  seeds_3d.jsonl     3D ground truth of those seeds

--seed-frames is a text file of "subject action camera frame" lines.
"""

import argparse
import json
import os
import sys

import numpy as np

TRAIN = ["S1", "S5", "S6", "S7", "S8"]
TEST = ["S9", "S11"]
KINEMATIC_PARENT = [-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 9, 8, 11, 12, 8, 14, 15]
LAYOUT = "h36m17"


def load(path, key):
    data = np.load(path, allow_pickle=True)
    if key not in data:
        sys.exit(f"{path}: missing array '{key}'")
    return data[key].item()


def to_world(p):
    # Camera frame (y down, z forward) to x right, y up, z toward camera.
    return np.stack([p[..., 0], -p[..., 1], -p[..., 2]], axis=-1)


def line(pid, joints):
    return json.dumps({"id": pid, "layout_id": LAYOUT, "joints": np.asarray(joints).tolist()})


def iterate(poses, subjects, stride):
    for s in subjects:
        for action in sorted(poses.get(s, {})):
            for cam, arr in enumerate(poses[s][action]):
                for f in range(0, len(arr), stride):
                    yield s, action, cam, f, arr[f]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--poses-2d", required=True)
    ap.add_argument("--poses-3d", required=True)
    ap.add_argument("--seed-frames")
    ap.add_argument("--stride", type=int, default=1, help="keep every n-th frame")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    p2 = load(args.poses_2d, "positions_2d")
    p3 = load(args.poses_3d, "positions_3d_cam")
    os.makedirs(args.out, exist_ok=True)

    with open(os.path.join(args.out, "train_2d.jsonl"), "w") as f:
        for s, a, c, i, kp in iterate(p2, TRAIN, args.stride):
            f.write(line(f"{s}/{a}/{c}/{i}", kp) + "\n")

    with open(os.path.join(args.out, "test_2d.jsonl"), "w") as f2, \
         open(os.path.join(args.out, "test_3d.jsonl"), "w") as f3:
        for s, a, c, i, kp in iterate(p2, TEST, args.stride):
            pid = f"{s}/{a}/{c}/{i}"
            f2.write(line(pid, kp) + "\n")
            f3.write(line(pid, to_world(p3[s][a][c][i])) + "\n")

    if args.seed_frames:
        seeds = []
        with open(args.seed_frames) as sf, open(os.path.join(args.out, "seeds_3d.jsonl"), "w") as f3:
            for raw in sf:
                if not raw.strip() or raw.startswith("#"):
                    continue
                s, a, c, i = raw.split()
                c, i = int(c), int(i)
                x = to_world(p3[s][a][c][i])
                signs = [1] + [1 if x[j, 2] >= x[KINEMATIC_PARENT[j], 2] else -1 for j in range(1, 17)]
                seeds.append({"image_ref": f"{s}/{a}/{c}/{i}", "layout_id": LAYOUT,
                              "keypoints_px": np.asarray(p2[s][a][c][i]).tolist(), "signs": signs})
                f3.write(line(f"{s}/{a}/{c}/{i}", x) + "\n")
        with open(os.path.join(args.out, "seeds.json"), "w") as f:
            json.dump(seeds, f, indent=1)


if __name__ == "__main__":
    main()
