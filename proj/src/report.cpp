// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smdn/evaluate.hpp"

namespace smdn {

namespace {

const char* kRecordHeader = "model,utterance,speaker,stratum,snr_db,input_sisdr,output_sisdr,sisdri,k_star,gate_entropy";
const char* kSummaryHeader = "model,K,H,total_params,effective_params,mean_sisdri,gate_accuracy";

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  return cells;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("csv: bad number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::string& text, const std::string& header, std::size_t width) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw FormatError("csv: unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != width) throw FormatError("csv: row has " + std::to_string(cells.size()) + " cells");
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("report: cannot write " + path.string());
}

}  // namespace

std::string records_csv(const std::vector<EvalRecord>& records) {
  std::string out = std::string(kRecordHeader) + "\n";
  for (const auto& r : records) {
    out += cell(r.model) + "," + cell(r.utterance) + "," + cell(r.speaker) + "," + cell(r.stratum) + "," +
           num(r.snr_db) + "," + num(r.input_sisdr) + "," + num(r.output_sisdr) + "," + num(r.sisdri) + "," +
           std::to_string(r.k_star) + "," + num(r.gate_entropy) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<ModelSummary>& summaries) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& s : summaries) {
    out += cell(s.model) + "," + std::to_string(s.k) + "," + std::to_string(s.hidden) + "," +
           std::to_string(s.total_params) + "," + std::to_string(s.effective_params) + "," + num(s.mean_sisdri) +
           "," + num(s.gate_accuracy) + "\n";
  }
  return out;
}

std::string summary_json(const std::vector<ModelSummary>& summaries) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : summaries) {
    rows.push_back({{"model", s.model},
                    {"K", s.k},
                    {"H", s.hidden},
                    {"total_params", s.total_params},
                    {"effective_params", s.effective_params},
                    {"mean_sisdri", s.mean_sisdri},
                    {"gate_accuracy", s.gate_accuracy},
                    {"records", s.records}});
  }
  return nlohmann::json{{"models", rows}}.dump(2) + "\n";
}

std::vector<EvalRecord> parse_records_csv(const std::string& text) {
  std::vector<EvalRecord> out;
  for (const auto& c : read_rows(text, kRecordHeader, 10)) {
    EvalRecord r;
    r.model = c[0];
    r.utterance = c[1];
    r.speaker = c[2];
    r.stratum = c[3];
    r.snr_db = to_double(c[4]);
    r.input_sisdr = to_double(c[5]);
    r.output_sisdr = to_double(c[6]);
    r.sisdri = to_double(c[7]);
    r.k_star = static_cast<int>(to_double(c[8]));
    r.gate_entropy = to_double(c[9]);
    out.push_back(r);
  }
  return out;
}

std::vector<ModelSummary> parse_summary_csv(const std::string& text) {
  std::vector<ModelSummary> out;
  for (const auto& c : read_rows(text, kSummaryHeader, 7)) {
    ModelSummary s;
    s.model = c[0];
    s.k = static_cast<int>(to_double(c[1]));
    s.hidden = static_cast<int>(to_double(c[2]));
    s.total_params = static_cast<std::int64_t>(to_double(c[3]));
    s.effective_params = static_cast<std::int64_t>(to_double(c[4]));
    s.mean_sisdri = to_double(c[5]);
    s.gate_accuracy = to_double(c[6]);
    out.push_back(s);
  }
  return out;
}

void emit_report(const EvalReport& report, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw ConfigError("report: cannot create " + dir);
  write_file(root / "records.csv", records_csv(report.records));
  write_file(root / "summary.csv", summary_csv(report.summaries));
  write_file(root / "summary.json", summary_json(report.summaries));
}

}  // namespace smdn
