#include "ehsim/csv.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "ehsim/errors.hpp"

namespace ehsim {

std::string fmt_prob(double p) {
    if (!std::isfinite(p)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5e", p);
    return buf;
}

std::string fmt_num(double x) {
    if (!std::isfinite(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt_num(std::optional<double> x) { return x ? fmt_num(*x) : ""; }
std::string fmt_prob(std::optional<double> p) { return p ? fmt_prob(*p) : ""; }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string hex_hash(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& title, std::uint64_t config_hash,
                     std::uint64_t seed, const std::vector<std::string>& header)
    : path_(path), n_columns_(header.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw InputError("cannot write " + path.string());
    out_ << "# " << title << "\n";
    out_ << "# config_hash=" << hex_hash(config_hash) << " seed=" << seed << "\n";
    out_ << "# generated " << utc_timestamp() << "\n";
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_columns_) throw Error("csv: row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << "\n";
    out_.flush();
}

void CsvWriter::comment(const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) out_ << "# " << line << "\n";
    out_.flush();
}

std::string csv_body(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::string body, line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        body += line;
        body += '\n';
    }
    return body;
}

}  // namespace ehsim
