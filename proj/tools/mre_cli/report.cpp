#include "mre_cli/report.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

namespace mre::cli {

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += row.population;
    out += ',';
    if (row.h) out += format_real(*row.h);
    out += ',';
    out += format_real(row.risk.mean_loss);
    out += ',';
    out += format_real(row.risk.std_error);
    out += ',';
    out += std::to_string(row.risk.replicates);
    out += ',';
    out += std::to_string(row.risk.seed);
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json run_metadata() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"generated_at", buf}, {"tool", "mre"}, {"version", "0.1.0"}};
}

}  // namespace mre::cli
