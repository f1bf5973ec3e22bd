// Smallest end-to-end library use: build a two-frame synthetic clip in
// memory, run the selection, and print the manifest to stdout.

#include <cstdint>
#include <iostream>

#include "eps/eps.hpp"

int main() {
  eps::FrameSequence clip;
  for (int t = 0; t < 2; ++t) {
    eps::LumaPlane frame;
    frame.width = 128;
    frame.height = 128;
    frame.samples.resize(128 * 128);
    std::uint32_t state = 12345;
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) {
        // left half: flat gray; right half: noise that shifts on frame 2
        if (x < 64) {
          frame.at(x, y) = 96;
        } else {
          state = state * 1664525u + 1013904223u;
          frame.at(x, y) = static_cast<std::uint8_t>((state >> 24) + (t * 37));
        }
      }
    }
    clip.frames.push_back(std::move(frame));
  }

  eps::SamplerConfig config;
  config.patch_w = 64;
  config.patch_h = 64;
  config.n_clusters = 2;

  const eps::SelectionManifest manifest = eps::sample_video(clip, config);
  std::cout << eps::manifest_to_text(manifest);
  std::cout << "\n" << eps::summarize(manifest);
  return 0;
}
