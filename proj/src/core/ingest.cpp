#include "core/ingest.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace paikit {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double_field(const std::string& field, std::size_t line_no,
                          const std::string& column) {
  if (field.empty()) {
    fail(ErrorKind::Parse,
         "line " + std::to_string(line_no) + ": empty value in column " +
             column);
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || errno == ERANGE) {
    fail(ErrorKind::Parse, "line " + std::to_string(line_no) +
                               ": non-numeric value '" + field +
                               "' in column " + column);
  }
  return v;
}

int parse_age_field(const std::string& field, std::size_t line_no) {
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size()) {
    fail(ErrorKind::Parse, "line " + std::to_string(line_no) +
                               ": non-integer age '" + field + "'");
  }
  if (v < kMinAge || v > kMaxAge) {
    fail(ErrorKind::Validation,
         "line " + std::to_string(line_no) + ": age " + field +
             " outside [" + std::to_string(kMinAge) + ", " +
             std::to_string(kMaxAge) + "]");
  }
  return static_cast<int>(v);
}

// Reads the whole file and splits into lines; accepts a trailing '\r'
// per line and an optional final newline.
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::Io, "cannot open " + path + " for reading");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorKind::Io, "cannot open " + path + " for writing");
  }
  out << content;
  if (!out) {
    fail(ErrorKind::Io, "write failed for " + path);
  }
}

constexpr int kLandmarkColumns = 3 + 2 * kLandmarkSlots;  // 59

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string landmark_csv_header() {
  std::string h = "subject_id,sex,age";
  for (int s = 0; s < kLandmarkSlots; ++s) {
    const LandmarkId id = LandmarkSet::slot_id(s);
    std::string base(landmark_token(id.name));
    if (id.side == Side::Left) base += "_left";
    if (id.side == Side::Right) base += "_right";
    h += "," + base + "_x," + base + "_y";
  }
  return h;
}

Dataset parse_landmark_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    fail(ErrorKind::Parse, path + ": empty file, header row required");
  }
  if (lines[0] != landmark_csv_header()) {
    fail(ErrorKind::Schema,
         path + ": unexpected header; expected the canonical " +
             std::to_string(kLandmarkColumns) + "-column landmark schema");
  }

  Dataset ds;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != kLandmarkColumns) {
      fail(ErrorKind::Parse,
           "line " + std::to_string(line_no) + ": expected " +
               std::to_string(kLandmarkColumns) + " columns, found " +
               std::to_string(f.size()));
    }
    FaceRecord rec;
    rec.subject_id = f[0];
    rec.sex = parse_sex_token(f[1]);
    rec.age = parse_age_field(f[2], line_no);
    for (int s = 0; s < kLandmarkSlots; ++s) {
      const std::string col = "coordinate " + std::to_string(s);
      Point p;
      p.x = parse_double_field(f[3 + 2 * s], line_no, col + ".x");
      p.y = parse_double_field(f[3 + 2 * s + 1], line_no, col + ".y");
      rec.landmarks.set_slot(s, p);
    }
    try {
      rec.validate();
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(rec.subject_id).second) {
      fail(ErrorKind::Validation,
           "line " + std::to_string(line_no) + ": duplicate subject_id '" +
               rec.subject_id + "'");
    }
    ds.records.push_back(std::move(rec));
  }
  ds.provenance.source = path;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    ds.provenance.checksum = fnv1a64(bytes.data(), bytes.size());
  }
  return ds;
}

void write_landmark_csv(const Dataset& dataset, const std::string& path) {
  std::string out = landmark_csv_header();
  out += '\n';
  for (const FaceRecord& rec : dataset.records) {
    out += rec.subject_id;
    out += ',';
    out += sex_token(rec.sex);
    out += ',';
    out += std::to_string(rec.age);
    for (int s = 0; s < kLandmarkSlots; ++s) {
      const Point p = rec.landmarks.at_slot(s);
      out += ',';
      out += format_value(p.x);
      out += ',';
      out += format_value(p.y);
    }
    out += '\n';
  }
  write_file(path, out);
}

void PaiTable::validate() const {
  const std::size_t n = rows();
  if (sexes.size() != n || ages.size() != n ||
      features.size() != n * kPaiCount) {
    fail(ErrorKind::Validation, "inconsistent PaiTable column lengths");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < n; ++r) {
    if (ages[r] < kMinAge || ages[r] > kMaxAge) {
      fail(ErrorKind::Validation,
           "row " + std::to_string(r + 1) + ": age out of range");
    }
    if (!seen.insert(subject_ids[r]).second) {
      fail(ErrorKind::Validation,
           "duplicate subject_id '" + subject_ids[r] + "'");
    }
  }
  for (double v : features) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::Validation, "non-finite feature value in table");
    }
  }
}

namespace {

std::string pai_csv_header() {
  std::string h = "subject_id,sex,age";
  for (int i = 1; i <= kPaiCount; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), ",pai_%03d", i);
    h += buf;
  }
  return h;
}

}  // namespace

PaiTable parse_pai_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    fail(ErrorKind::Parse, path + ": empty file, header row required");
  }
  if (lines[0] != pai_csv_header()) {
    const std::size_t found = split_csv_line(lines[0]).size();
    fail(ErrorKind::Schema,
         path + ": unexpected header; expected " +
             std::to_string(kPaiCount + 3) + " columns (subject_id, sex, "
             "age, pai_001..pai_208), found " + std::to_string(found));
  }
  PaiTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != kPaiCount + 3) {
      fail(ErrorKind::Schema,
           "line " + std::to_string(line_no) + ": expected " +
               std::to_string(kPaiCount + 3) + " columns (208 features + "
               "3 labels), found " + std::to_string(f.size()));
    }
    t.subject_ids.push_back(f[0]);
    try {
      t.sexes.push_back(parse_sex_token(f[1]));
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    t.ages.push_back(parse_age_field(f[2], line_no));
    for (int j = 0; j < kPaiCount; ++j) {
      const double v =
          parse_double_field(f[3 + j], line_no, "pai_" + std::to_string(j + 1));
      if (!std::isfinite(v)) {
        fail(ErrorKind::Validation,
             "line " + std::to_string(line_no) + ": non-finite value in pai_" +
                 std::to_string(j + 1));
      }
      t.features.push_back(v);
    }
  }
  t.validate();
  return t;
}

std::string serialize_pai_csv(const PaiTable& table) {
  std::string out = pai_csv_header();
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += table.subject_ids[r];
    out += ',';
    out += sex_token(table.sexes[r]);
    out += ',';
    out += std::to_string(table.ages[r]);
    for (int j = 0; j < kPaiCount; ++j) {
      out += ',';
      out += format_value(table.at(r, j));
    }
    out += '\n';
  }
  return out;
}

void write_pai_csv(const PaiTable& table, const std::string& path) {
  write_file(path, serialize_pai_csv(table));
}

std::uint64_t table_checksum(const PaiTable& table) {
  const std::string bytes = serialize_pai_csv(table);
  return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace paikit
