#pragma once

#include <CLI11.hpp>

namespace herd::cli {

/// CLI11 config reader for JSON files. Nested objects address subcommands:
///   {"compute": {"input": "panel.csv", "epsilon": 25, "indices": ["rhix"]}}
/// Values given on the command line take precedence.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace herd::cli
