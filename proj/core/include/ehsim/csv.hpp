// Minimal RFC-4180 CSV writer with a provenance comment block.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace ehsim {

/// Probabilities: scientific notation, 6 significant digits.
std::string fmt_prob(double p);
/// Other reals: shortest form with 10 significant digits.
std::string fmt_num(double x);
std::string fmt_num(std::optional<double> x);
std::string fmt_prob(std::optional<double> p);
std::string csv_escape(const std::string& field);
std::string hex_hash(std::uint64_t h);

class CsvWriter {
public:
    /// Writes `# <title>`, `# config_hash=.. seed=..`, a timestamp comment, then the header row.
    CsvWriter(const std::filesystem::path& path, const std::string& title, std::uint64_t config_hash,
              std::uint64_t seed, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);
    void comment(const std::string& text);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t n_columns_;
};

/// Reads a CSV file back, skipping `#` comment lines (used by tests and diffing).
std::string csv_body(const std::filesystem::path& path);

}  // namespace ehsim
