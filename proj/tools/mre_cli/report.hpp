#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mre/risk.hpp"

namespace mre::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One CSV line: population label ("all" or a 0-based index), the weight h
/// when one applies, and the risk estimate.
struct CsvRow {
  std::string population;
  std::optional<double> h;
  RiskEstimate risk;
};

inline constexpr const char* kCsvHeader = "population,h,mean_loss,std_error,replicates,seed";

/// Shortest round-trip decimal form of x.
std::string format_real(double x);

/// Comma-separated, '.' decimal point, header row, LF line endings.
std::string to_csv(const std::vector<CsvRow>& rows);

/// Creates parent directories as needed; throws IoError naming the path.
void write_file(const std::filesystem::path& path, const std::string& content);

/// The only non-reproducible part of a report: wall-clock time and tool info.
nlohmann::json run_metadata();

}  // namespace mre::cli
