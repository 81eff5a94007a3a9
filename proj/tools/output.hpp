#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cascade_clock::cli {

/// Shortest representation that round-trips.
std::string format_number(double value);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& field(std::string_view text);
    CsvWriter& field(double value);
    CsvWriter& field(long long value);
    CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
    CsvWriter& empty();
    void end_row();

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool first_ = true;
};

struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    nlohmann::ordered_json seed;  ///< null unless the run is seeded
    std::vector<std::string> artifacts;

    nlohmann::ordered_json to_json() const;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace cascade_clock::cli
