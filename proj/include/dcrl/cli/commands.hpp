#pragma once

#include "dcrl/encoder/encoder.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcrl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kMissingFile = 4,
  kRuntime = 5,
  kManifestMismatch = 6,
};

class MissingFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data directory: DCRL_DATA_DIR when set, otherwise the source tree's data/.
std::filesystem::path default_data_dir();

/// Dataset directory written by gen-data.
struct DatasetManifest {
  std::string config_hash;
  nlohmann::json config;
  encoder::ModelManifest encoder;
  std::size_t conversations = 0;
  std::size_t steps = 0;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
  static DatasetManifest load(const std::filesystem::path& dir);
};

/// Runs one command line (argv[0] is the program name). `in` feeds `chat`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace dcrl::cli
