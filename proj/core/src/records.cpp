#include "blockade/records.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "blockade/error.hpp"

namespace blockade {

namespace {

constexpr const char* kMagic = "# blockade emission records v1";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kIo, "bad number '" + std::string(text) + "' on line " +
                                    std::to_string(line_no));
  }
  return value;
}

}  // namespace

void write_records(std::ostream& out, std::span<const EmissionRecord> records,
                   std::span<const std::string> header_lines) {
  out << kMagic << '\n';
  for (const auto& line : header_lines) out << "# " << line << '\n';
  for (const auto& rec : records) {
    out << "@record seed=" << rec.seed << " stream=" << rec.stream
        << " duration=" << format_double(rec.duration) << " pulse_count=" << rec.pulse_count
        << " clicks=" << rec.click_times.size() << '\n';
    for (double t : rec.click_times) out << format_double(t) << '\n';
  }
}

std::vector<EmissionRecord> read_records(std::istream& in) {
  std::vector<EmissionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool magic_seen = false;
  std::size_t expected_clicks = 0;

  auto finish = [&](std::size_t at_line) {
    if (!records.empty() && records.back().click_times.size() != expected_clicks) {
      throw Error(ErrorCode::kIo, "record ending before line " + std::to_string(at_line) +
                                      " has the wrong click count");
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == kMagic) magic_seen = true;
      continue;
    }
    if (!magic_seen) throw Error(ErrorCode::kIo, "missing emission-record header line");
    if (line.rfind("@record", 0) == 0) {
      finish(line_no);
      EmissionRecord rec;
      std::istringstream fields(line.substr(7));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::kIo, "bad field '" + kv + "'");
        const std::string_view key(kv.data(), eq);
        const std::string_view val(kv.data() + eq + 1, kv.size() - eq - 1);
        if (key == "seed") rec.seed = parse_number<std::uint64_t>(val, line_no);
        else if (key == "stream") rec.stream = parse_number<std::uint64_t>(val, line_no);
        else if (key == "duration") rec.duration = parse_number<double>(val, line_no);
        else if (key == "pulse_count") rec.pulse_count = parse_number<std::size_t>(val, line_no);
        else if (key == "clicks") expected_clicks = parse_number<std::size_t>(val, line_no);
        else throw Error(ErrorCode::kIo, "unknown record field '" + std::string(key) + "'");
      }
      rec.click_times.reserve(expected_clicks);
      records.push_back(std::move(rec));
      continue;
    }
    if (records.empty()) throw Error(ErrorCode::kIo, "click time before any @record line");
    records.back().click_times.push_back(parse_number<double>(line, line_no));
  }
  finish(line_no + 1);
  for (const auto& rec : records) rec.validate();
  return records;
}

void save_records(const std::filesystem::path& path, std::span<const EmissionRecord> records,
                  std::span<const std::string> header_lines) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_records(out, records, header_lines);
}

std::vector<EmissionRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_records(in);
}

}  // namespace blockade
