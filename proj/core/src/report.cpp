#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "oltd/harness.hpp"

namespace oltd {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("CSV line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string to_csv(const std::vector<BerRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.scenario + ',' + r.method + ',' + r.sweep_var + ',' + shortest(r.sweep_value) + ',' +
           std::to_string(r.errors) + ',' + std::to_string(r.bits) + ',' + shortest(r.ber) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string to_plotdata(const std::vector<BerRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::string> blocks;
  for (const auto& r : records) {
    auto [it, inserted] = blocks.try_emplace(r.method, "# " + r.method + '\n');
    if (inserted) order.push_back(r.method);
    it->second += shortest(r.sweep_value) + ' ' + shortest(r.ber) + '\n';
  }
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) out += '\n';
    out += blocks[order[i]];
  }
  return out;
}

std::vector<BerRecord> parse_csv(std::string_view text) {
  std::vector<BerRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw std::invalid_argument("CSV header mismatch");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected 8 fields");
    BerRecord r;
    r.scenario = f[0];
    r.method = f[1];
    r.sweep_var = f[2];
    r.sweep_value = parse_field<double>(f[3], line_no);
    r.errors = parse_field<std::int64_t>(f[4], line_no);
    r.bits = parse_field<std::int64_t>(f[5], line_no);
    r.ber = parse_field<double>(f[6], line_no);
    r.seed = parse_field<std::uint64_t>(f[7], line_no);
    records.push_back(std::move(r));
  }
  if (line_no == 0) throw std::invalid_argument("CSV is empty");
  return records;
}

void emit(const std::vector<BerRecord>& records, const std::string& path, OutputFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << (format == OutputFormat::Csv ? to_csv(records) : to_plotdata(records));
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace oltd
