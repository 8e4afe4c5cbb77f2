// Synthesizes structure and keypoint maps for one annotation record and
// prints a coarse view of the whole-hand channel.
//
//   synth_one [annotations.txt] [record-index]

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "nsrm/nsrm.hpp"

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : "hands.txt";
  const std::size_t index = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 0;
  try {
    const auto records = nsrm::load_annotations(path, nsrm::AnnotationFormat::CANONICAL);
    if (index >= records.size()) {
      std::cerr << path << " has " << records.size() << " records\n";
      return 2;
    }
    const nsrm::CropResult crop = nsrm::crop_hand(records[index]);
    const nsrm::SynthesisConfig cfg;
    const auto structure = nsrm::synthesize_structure(crop.keypoints, nsrm::default_topology(),
                                                      nsrm::GroupScheme::G1AND6, nsrm::Representation::LPM, cfg);
    const auto kcm = nsrm::synthesize_kcm(crop.keypoints, cfg);

    std::printf("%s: %zu structure channels, %zu keypoint channels, %dx%d\n", records[index].image_id.c_str(),
                structure.size(), kcm.size(), structure.width(), structure.height());
    const auto& hand = structure[0];
    for (int i = 0; i < hand.height; i += 2) {
      for (int j = 0; j < hand.width; ++j) {
        const float v = hand.at(i, j);
        std::putchar(v > 0.75f ? '#' : v > 0.3f ? '+' : v > 0.05f ? '.' : ' ');
      }
      std::putchar('\n');
    }

    const auto decoded = nsrm::decode_keypoints(kcm, cfg.grid);
    const auto back = nsrm::uncrop(crop, decoded);
    for (std::size_t k : {0u, 4u, 8u, 12u, 16u, 20u}) {
      if (!back[k].visible) continue;
      std::printf("kp%-2zu annotated (%.1f, %.1f) decoded (%.1f, %.1f)\n", k, records[index].keypoints[k].x,
                  records[index].keypoints[k].y, back[k].x, back[k].y);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
