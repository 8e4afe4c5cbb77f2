#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsrm/error.hpp"
#include "nsrm/keypoints.hpp"

namespace nsrm {

struct AnnotationRecord {
  std::string image_id;
  std::string image_path;
  int image_width = 0;   // 0 when unknown
  int image_height = 0;
  KeypointSet keypoints;  // original-image pixels

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Indices of visible keypoints outside the image (only when the size is known).
inline std::vector<std::size_t> out_of_frame(const AnnotationRecord& rec) {
  std::vector<std::size_t> out;
  if (rec.image_width <= 0 || rec.image_height <= 0) return out;
  for (std::size_t k = 0; k < rec.keypoints.size(); ++k) {
    const auto& p = rec.keypoints[k];
    if (p.visible && (p.x < 0 || p.y < 0 || p.x > rec.image_width || p.y > rec.image_height)) out.push_back(k);
  }
  return out;
}

enum class AnnotationFormat { CANONICAL, PANOPTIC_HANDS, ONEHAND10K };

inline AnnotationFormat parse_annotation_format(std::string_view s) {
  if (s == "CANONICAL" || s == "canonical") return AnnotationFormat::CANONICAL;
  if (s == "PANOPTIC_HANDS" || s == "panoptic") return AnnotationFormat::PANOPTIC_HANDS;
  if (s == "ONEHAND10K" || s == "onehand10k") return AnnotationFormat::ONEHAND10K;
  throw ConfigError("unknown annotation format '" + std::string(s) + "'");
}

// Canonical text format, tab separated, one record per line:
//
//   #NSRM-ANNOTATIONS v1 keypoints=<K>
//   image_id  image_path  image_width  image_height  x0 y0 v0 ... x<K-1> y<K-1> v<K-1>
//
// v is 1 (visible) or 0 (unannotated). Further '#' lines and blank lines are
// skipped. Reals are written in shortest round-trip form.
inline constexpr std::string_view kCanonicalHeader = "#NSRM-ANNOTATIONS v1";

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

inline ParseError parse_error(const std::string& source, std::size_t line, const std::string& record,
                              const std::string& what) {
  std::string msg = source + ":" + std::to_string(line);
  if (!record.empty()) msg += ": record '" + record + "'";
  return ParseError(msg + ": " + what);
}

inline std::string file_stem(std::string_view path) { return std::filesystem::path(path).stem().string(); }

}  // namespace detail

inline std::string to_canonical_line(const AnnotationRecord& rec) {
  std::string line = rec.image_id + '\t' + rec.image_path + '\t' + std::to_string(rec.image_width) + '\t' +
                     std::to_string(rec.image_height);
  for (const auto& p : rec.keypoints) {
    line += '\t' + detail::format_real(p.x);
    line += '\t' + detail::format_real(p.y);
    line += p.visible ? "\t1" : "\t0";
  }
  return line;
}

inline void write_canonical(std::ostream& out, const std::vector<AnnotationRecord>& records, int keypoint_count = 21) {
  out << kCanonicalHeader << " keypoints=" << keypoint_count << '\n';
  for (const auto& rec : records) {
    if (static_cast<int>(rec.keypoints.size()) != keypoint_count)
      throw ConfigError("record '" + rec.image_id + "' has " + std::to_string(rec.keypoints.size()) +
                        " keypoints, expected " + std::to_string(keypoint_count));
    out << to_canonical_line(rec) << '\n';
  }
}

inline std::vector<AnnotationRecord> read_canonical(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  int k = -1;
  std::vector<AnnotationRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (k < 0) {
      if (!line.starts_with(kCanonicalHeader))
        throw detail::parse_error(source, lineno, "", "missing '#NSRM-ANNOTATIONS v1' header");
      const auto pos = line.find("keypoints=");
      if (pos == std::string::npos || !detail::parse_number(std::string_view(line).substr(pos + 10), k) || k <= 0)
        throw detail::parse_error(source, lineno, "", "header lacks a valid keypoints=<K> field");
      continue;
    }
    if (detail::trim(line).empty() || line.front() == '#') continue;

    const auto fields = detail::split(line, '\t');
    const std::string id(fields[0]);
    const std::size_t expected = 4 + 3 * static_cast<std::size_t>(k);
    if (fields.size() != expected)
      throw detail::parse_error(source, lineno, id,
                                "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
    AnnotationRecord rec;
    rec.image_id = id;
    rec.image_path = std::string(fields[1]);
    if (!detail::parse_number(fields[2], rec.image_width) || !detail::parse_number(fields[3], rec.image_height))
      throw detail::parse_error(source, lineno, id, "malformed image size");
    rec.keypoints = KeypointSet(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      auto& p = rec.keypoints[static_cast<std::size_t>(j)];
      const std::size_t base = 4 + 3 * static_cast<std::size_t>(j);
      int v = 0;
      if (!detail::parse_number(fields[base], p.x) || !detail::parse_number(fields[base + 1], p.y))
        throw detail::parse_error(source, lineno, id, "malformed coordinate for keypoint " + std::to_string(j));
      if (!detail::parse_number(fields[base + 2], v) || (v != 0 && v != 1))
        throw detail::parse_error(source, lineno, id, "visibility of keypoint " + std::to_string(j) + " must be 0 or 1");
      p.visible = v == 1;
      if (p.visible && !(std::isfinite(p.x) && std::isfinite(p.y)))
        throw detail::parse_error(source, lineno, id, "visible keypoint " + std::to_string(j) + " is not finite");
    }
    out.push_back(std::move(rec));
  }
  if (k < 0) throw detail::parse_error(source, lineno, "", "empty annotation file");
  return out;
}

namespace detail {

inline KeypointSet json_points(const nlohmann::json& pts, const std::string& source, const std::string& id) {
  if (!pts.is_array()) throw ParseError(source + ": record '" + id + "': keypoint list is not an array");
  KeypointSet kps(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& e = pts[k];
    if (!e.is_array() || e.size() < 2 || !e[0].is_number() || !e[1].is_number())
      throw ParseError(source + ": record '" + id + "': malformed coordinate for keypoint " + std::to_string(k));
    kps[k].x = e[0].get<double>();
    kps[k].y = e[1].get<double>();
    kps[k].visible = e.size() < 3 || (e[2].is_number() && e[2].get<double>() != 0.0);
  }
  return kps;
}

// Either a database file {"root": [{img_paths, img_width, img_height,
// joint_self}, ...]} or a single-image label {"hand_pts": [...]}.
inline std::vector<AnnotationRecord> read_panoptic_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::vector<AnnotationRecord> out;
  const std::string source = path.string();
  if (doc.contains("root")) {
    std::size_t idx = 0;
    for (const auto& e : doc.at("root")) {
      AnnotationRecord rec;
      rec.image_path = e.value("img_paths", std::string{});
      rec.image_id = rec.image_path.empty() ? std::to_string(idx) : file_stem(rec.image_path);
      rec.image_width = static_cast<int>(e.value("img_width", 0.0));
      rec.image_height = static_cast<int>(e.value("img_height", 0.0));
      if (!e.contains("joint_self")) throw ParseError(source + ": record '" + rec.image_id + "': no joint_self");
      rec.keypoints = json_points(e.at("joint_self"), source, rec.image_id);
      out.push_back(std::move(rec));
      ++idx;
    }
  } else if (doc.contains("hand_pts")) {
    AnnotationRecord rec;
    rec.image_id = path.stem().string();
    rec.image_path = (path.parent_path() / (rec.image_id + ".jpg")).string();
    rec.keypoints = json_points(doc.at("hand_pts"), source, rec.image_id);
    out.push_back(std::move(rec));
  } else {
    throw ParseError(source + ": neither a 'root' list nor 'hand_pts'");
  }
  return out;
}

}  // namespace detail

/// OneHand10K-style CSV: `name,x0,y0,...,x20,y20` or
/// `name,width,height,x0,y0,...`. A point with a negative coordinate is
/// unannotated.
inline std::vector<AnnotationRecord> read_onehand10k(std::istream& in, const std::string& source = "<stream>",
                                                     int keypoint_count = 21) {
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t coords = 2 * static_cast<std::size_t>(keypoint_count);
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto fields = detail::split(detail::trim(line), ',');
    AnnotationRecord rec;
    rec.image_path = std::string(detail::trim(fields[0]));
    rec.image_id = detail::file_stem(rec.image_path);
    std::size_t first = 1;
    if (fields.size() == coords + 3) {
      if (!detail::parse_number(fields[1], rec.image_width) || !detail::parse_number(fields[2], rec.image_height))
        throw detail::parse_error(source, lineno, rec.image_id, "malformed image size");
      first = 3;
    } else if (fields.size() != coords + 1) {
      throw detail::parse_error(source, lineno, rec.image_id,
                                "expected " + std::to_string(coords) + " coordinates, got " +
                                    std::to_string(fields.size() - 1) + " fields");
    }
    rec.keypoints = KeypointSet(static_cast<std::size_t>(keypoint_count));
    for (std::size_t k = 0; k < rec.keypoints.size(); ++k) {
      auto& p = rec.keypoints[k];
      if (!detail::parse_number(fields[first + 2 * k], p.x) || !detail::parse_number(fields[first + 2 * k + 1], p.y))
        throw detail::parse_error(source, lineno, rec.image_id, "malformed coordinate for keypoint " + std::to_string(k));
      p.visible = p.x >= 0.0 && p.y >= 0.0;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Reads annotations in any supported format. For PANOPTIC_HANDS `path` may
/// be a JSON file or a directory of per-image JSON labels (read in name order).
inline std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path, AnnotationFormat format) {
  namespace fs = std::filesystem;
  if (format == AnnotationFormat::PANOPTIC_HANDS) {
    if (!fs::is_directory(path)) return detail::read_panoptic_file(path);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<AnnotationRecord> out;
    for (const auto& f : files) {
      auto part = detail::read_panoptic_file(f);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (format == AnnotationFormat::ONEHAND10K) return read_onehand10k(in, path.string());
  return read_canonical(in, path.string());
}

inline void save_canonical(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records,
                           int keypoint_count = 21) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_canonical(out, records, keypoint_count);
}

}  // namespace nsrm
