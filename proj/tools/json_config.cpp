#include "json_config.hpp"

namespace cascade_clock::cli {

namespace {

std::string scalar_text(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
}

void add_items(const nlohmann::json& options, const std::string& subcommand, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : options.items()) {
        if (value.is_null()) continue;
        CLI::ConfigItem item;
        item.parents = {subcommand};
        item.name = key;
        if (value.is_array()) {
            for (const auto& element : value) item.inputs.push_back(scalar_text(element));
        } else {
            item.inputs.push_back(scalar_text(value));
        }
        items.push_back(std::move(item));
    }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App*, bool, bool, std::string) const {
    throw CLI::ConfigError("writing JSON configs is not supported");
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& err) {
        throw CLI::ConversionError("config: " + std::string(err.what()));
    }
    if (!doc.is_object()) throw CLI::ConversionError("config: top level must be a JSON object");

    std::vector<CLI::ConfigItem> items;
    if (doc.contains("subcommand")) {
        const auto name = doc.at("subcommand").get<std::string>();
        if (doc.contains("parameters")) add_items(doc.at("parameters"), name, items);
        return items;
    }
    for (const auto& [name, options] : doc.items()) {
        if (!options.is_object()) throw CLI::ConversionError("config: '" + name + "' must map to an object");
        add_items(options, name, items);
    }
    return items;
}

}  // namespace cascade_clock::cli
