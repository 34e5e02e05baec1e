// Copyright 2026 The softlabel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softlabel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "softlabel/errors.hpp"

namespace softlabel {

namespace {

using nlohmann::json;

std::string render_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, long line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("cannot parse number '" + std::string(s) + "'", line);
  return v;
}

void normalize_row(SoftLabel& d, const std::string& id, long line) {
  double sum = 0.0;
  for (double v : d.values) sum += v;
  if (!(sum > 0.0))
    throw ParseError("row '" + id + "': cannot normalize, sum is " + render_double(sum), line);
  for (double& v : d.values) v /= sum;
}

// Sum-to-one violations are collected across the file and reported together.
class SumViolations {
 public:
  void check(const LabeledExample& ex, int c) {
    if (static_cast<int>(ex.soft.values.size()) != c) return;  // reported elsewhere
    double sum = 0.0;
    bool range_ok = true;
    for (double v : ex.soft.values) {
      sum += v;
      range_ok = range_ok && v >= 0.0 && v <= 1.0;
    }
    if (!range_ok || std::abs(sum - 1.0) > kSoftLabelSumTol) offenders_.push_back(ex.id);
  }
  void raise_if_any() const {
    if (offenders_.empty()) return;
    std::string msg = "soft labels violate the sum-to-one tolerance for ids:";
    for (const auto& id : offenders_) msg += " '" + id + "'";
    throw ValidationError(msg);
  }

 private:
  std::vector<std::string> offenders_;
};

SoftDataset load_jsonl(std::istream& in, bool normalize) {
  SoftDataset ds;
  SumViolations violations;
  std::string linebuf;
  long lineno = 0;
  bool saw_header = false;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.empty()) continue;
    json row;
    try {
      row = json::parse(linebuf);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!row.is_object()) throw ParseError("expected a JSON object", lineno);
    if (lineno == 1 && row.contains("c") && !row.contains("id")) {
      ds.c = row.at("c").get<int>();
      saw_header = true;
      continue;
    }
    LabeledExample ex;
    try {
      ex.id = row.at("id").get<std::string>();
      ex.true_label = row.at("y").get<int>();
      ex.soft.values = row.at("d").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad row: ") + e.what(), lineno);
    }
    if (ds.c == 0 && !saw_header) ds.c = ex.soft.size();
    if (ex.soft.size() != ds.c)
      throw ParseError("row '" + ex.id + "': " + std::to_string(ex.soft.size()) +
                           " soft-label entries, expected " + std::to_string(ds.c),
                       lineno);
    if (normalize) normalize_row(ex.soft, ex.id, lineno);
    violations.check(ex, ds.c);
    ds.examples.push_back(std::move(ex));
  }
  violations.raise_if_any();
  ds.validate();
  return ds;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

SoftDataset load_csv(std::istream& in, bool normalize) {
  SoftDataset ds;
  SumViolations violations;
  std::string linebuf;
  if (!std::getline(in, linebuf)) throw ParseError("empty file, header row required", 1);
  const auto header = split_csv(linebuf);
  if (header.size() < 4 || header[0] != "id" || header[1] != "y")
    throw ParseError("expected header id,y,d0,...", 1);
  ds.c = static_cast<int>(header.size()) - 2;
  long lineno = 1;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.empty()) continue;
    const auto cols = split_csv(linebuf);
    if (cols.size() != header.size())
      throw ParseError("row has " + std::to_string(cols.size()) + " columns, expected " +
                           std::to_string(header.size()),
                       lineno);
    LabeledExample ex;
    ex.id = cols[0];
    ex.true_label = static_cast<int>(parse_double(cols[1], lineno));
    ex.soft.values.reserve(static_cast<size_t>(ds.c));
    for (size_t i = 2; i < cols.size(); ++i) ex.soft.values.push_back(parse_double(cols[i], lineno));
    if (normalize) normalize_row(ex.soft, ex.id, lineno);
    violations.check(ex, ds.c);
    ds.examples.push_back(std::move(ex));
  }
  violations.raise_if_any();
  ds.validate();
  return ds;
}

}  // namespace

FileFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return FileFormat::Csv;
  return FileFormat::Jsonl;
}

SoftDataset load_dataset(std::istream& in, FileFormat format, bool normalize) {
  return format == FileFormat::Jsonl ? load_jsonl(in, normalize) : load_csv(in, normalize);
}

SoftDataset load_dataset(const std::string& path, FileFormat format, bool normalize) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return load_dataset(in, format, normalize);
}

void save_dataset(const SoftDataset& ds, std::ostream& out, FileFormat format) {
  if (format == FileFormat::Jsonl) {
    out << json{{"c", ds.c}}.dump() << '\n';
    for (const auto& ex : ds.examples) {
      json row{{"id", ex.id}, {"y", ex.true_label}, {"d", ex.soft.values}};
      out << row.dump() << '\n';
    }
  } else {
    out << "id,y";
    for (int i = 0; i < ds.c; ++i) out << ",d" << i;
    out << '\n';
    for (const auto& ex : ds.examples) {
      out << ex.id << ',' << ex.true_label;
      for (double v : ex.soft.values) out << ',' << render_double(v);
      out << '\n';
    }
  }
}

void save_dataset(const SoftDataset& ds, const std::string& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  save_dataset(ds, out, format);
}

}  // namespace softlabel
