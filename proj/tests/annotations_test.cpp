#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nsrm/annotations.hpp"
#include "test_support.hpp"

using namespace nsrm;

namespace {

AnnotationRecord random_record(std::mt19937_64& rng, int i) {
  AnnotationRecord r;
  r.image_id = "img" + std::to_string(i);
  r.image_path = "images/img " + std::to_string(i) + ".jpg";
  r.image_width = 640;
  r.image_height = 480;
  r.keypoints = fixtures::random_hand(rng, 0, 480, 0.2);
  return r;
}

std::string header() { return "#NSRM-ANNOTATIONS v1 keypoints=21\n"; }

std::string line_with(const std::string& id, const std::string& kp5) {
  std::string s = id + "\tpath.jpg\t100\t100";
  for (int k = 0; k < 21; ++k) s += k == 5 ? "\t" + kp5 : "\t1\t2\t1";
  return s + "\n";
}

}  // namespace

TEST(Canonical, WriteReadIsIdentity) {
  std::mt19937_64 rng(1);
  std::vector<AnnotationRecord> recs;
  for (int i = 0; i < 50; ++i) recs.push_back(random_record(rng, i));
  std::stringstream ss;
  write_canonical(ss, recs);
  EXPECT_EQ(read_canonical(ss), recs);
}

TEST(Canonical, SingleRecord) {
  std::stringstream ss(header() + line_with("a", "3\t4\t1"));
  const auto recs = read_canonical(ss);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].keypoints.size(), 21u);
  EXPECT_EQ(recs[0].keypoints[5], (Keypoint{3, 4, true}));
}

TEST(Canonical, MissingPointsBecomeInvisible) {
  std::string s = "r\tp\t10\t10";
  for (int k = 0; k < 21; ++k) s += (k == 2 || k == 9 || k == 20) ? "\t0\t0\t0" : "\t1\t1\t1";
  std::stringstream ss(header() + "# comment\n\n" + s + "\n");
  const auto recs = read_canonical(ss);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].keypoints.visible_count(), 18u);
  EXPECT_FALSE(recs[0].keypoints[9].visible);
}

TEST(Canonical, MalformedCoordinateNamesRecord) {
  std::stringstream ss(header() + line_with("good", "1\t1\t1") + line_with("hand_042", "abc\t4\t1"));
  try {
    read_canonical(ss, "ann.txt");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("hand_042"), std::string::npos) << msg;
    EXPECT_NE(msg.find("ann.txt:3"), std::string::npos) << msg;
  }
}

TEST(Canonical, OtherErrors) {
  std::stringstream no_header(line_with("a", "1\t1\t1"));
  EXPECT_THROW(read_canonical(no_header), ParseError);
  std::stringstream short_line(header() + "a\tb\t1\t1\t0\t0\n");
  EXPECT_THROW(read_canonical(short_line), ParseError);
  std::stringstream bad_vis(header() + line_with("a", "1\t1\t2"));
  EXPECT_THROW(read_canonical(bad_vis), ParseError);
  std::stringstream empty("");
  EXPECT_THROW(read_canonical(empty), ParseError);
}

TEST(Canonical, OutOfFrame) {
  AnnotationRecord r;
  r.image_width = 100;
  r.image_height = 50;
  r.keypoints = KeypointSet(3);
  r.keypoints[0] = {10, 10, true};
  r.keypoints[1] = {10, 60, true};
  r.keypoints[2] = {-5, 10, false};
  EXPECT_EQ(out_of_frame(r), (std::vector<std::size_t>{1}));
}

TEST(OneHand10k, MissingPointsAreNegative) {
  std::string line = "Train/source/0001.jpg";
  for (int k = 0; k < 21; ++k) line += k == 3 ? ",-1,-1" : "," + std::to_string(k) + "," + std::to_string(2 * k);
  std::stringstream ss(line + "\n");
  const auto recs = read_onehand10k(ss);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].image_id, "0001");
  EXPECT_FALSE(recs[0].keypoints[3].visible);
  EXPECT_EQ(recs[0].keypoints[4], (Keypoint{4, 8, true}));
}

TEST(OneHand10k, WithImageSizeAndErrors) {
  std::string line = "a.jpg,320,240";
  for (int k = 0; k < 21; ++k) line += ",1,1";
  std::stringstream ss(line + "\n");
  const auto recs = read_onehand10k(ss);
  EXPECT_EQ(recs[0].image_width, 320);
  std::stringstream bad("a.jpg,1,2,3\n");
  EXPECT_THROW(read_onehand10k(bad), ParseError);
}

TEST(Panoptic, DatabaseAndPerImageFiles) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nsrm_panoptic_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "labels");
  nlohmann::json pts = nlohmann::json::array();
  for (int k = 0; k < 21; ++k) pts.push_back({k * 1.5, k * 2.0, k == 4 ? 0 : 1});
  {
    std::ofstream f(dir / "db.json");
    f << nlohmann::json{{"root", {{{"img_paths", "imgs/00000007.jpg"}, {"img_width", 1920.0}, {"img_height", 1080.0},
                                   {"joint_self", pts}}}}}.dump();
  }
  {
    std::ofstream f(dir / "labels" / "b.json");
    f << nlohmann::json{{"hand_pts", pts}, {"is_left", 0}}.dump();
    std::ofstream g(dir / "labels" / "a.json");
    g << nlohmann::json{{"hand_pts", pts}, {"is_left", 1}}.dump();
  }
  const auto db = load_annotations(dir / "db.json", AnnotationFormat::PANOPTIC_HANDS);
  ASSERT_EQ(db.size(), 1u);
  EXPECT_EQ(db[0].image_id, "00000007");
  EXPECT_EQ(db[0].image_width, 1920);
  EXPECT_FALSE(db[0].keypoints[4].visible);
  EXPECT_EQ(db[0].keypoints[2], (Keypoint{3.0, 4.0, true}));
  const auto labels = load_annotations(dir / "labels", AnnotationFormat::PANOPTIC_HANDS);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[0].image_id, "a");
  EXPECT_EQ(labels[1].image_id, "b");
  fs::remove_all(dir);
}

TEST(LoadAnnotations, UnknownFormat) { EXPECT_THROW(parse_annotation_format("coco"), ConfigError); }
