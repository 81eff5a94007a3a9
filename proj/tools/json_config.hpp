#pragma once

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace cascade_clock::cli {

/// Reads option values from JSON. Accepts either a run manifest
/// ({"subcommand": ..., "parameters": {...}}) or an object whose keys are
/// subcommand names mapping to option objects. Option keys use the long flag
/// name without dashes.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace cascade_clock::cli
