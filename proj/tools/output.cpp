#include "output.hpp"

#include <charconv>
#include <stdexcept>

#include "version.hpp"

namespace cascade_clock::cli {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::string quote_if_needed(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string quoted = "\"";
    for (char ch : text) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + '"';
}

}  // namespace

std::string format_number(double value) {
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buffer, end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(open_for_write(path)) {
    for (const auto& name : header) field(name);
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view text) {
    if (!first_) out_ << ',';
    out_ << quote_if_needed(text);
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_number(value))); }

CsvWriter& CsvWriter::field(long long value) { return field(std::string_view(std::to_string(value))); }

CsvWriter& CsvWriter::empty() { return field(std::string_view()); }

void CsvWriter::end_row() {
    out_ << "\r\n";
    first_ = true;
    if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json doc;
    doc["subcommand"] = subcommand;
    doc["parameters"] = parameters;
    doc["seed"] = seed;
    doc["artifacts"] = artifacts;
    doc["tool_version"] = kToolVersion;
    return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cascade_clock::cli
