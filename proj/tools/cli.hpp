#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace andes::cli {

/// Exit codes: 0 success, 1 user or data error, 2 internal error.
inline constexpr int kOk = 0;
inline constexpr int kUserError = 1;
inline constexpr int kInternalError = 2;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Command-line values that take precedence over the pipeline config file.
struct PipelineOverrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
};

/// Runs normalize -> filter -> (augment) -> stats as described by a JSON
/// config file and writes a manifest. Throws andes::Error on user/data
/// errors.
void run_pipeline(const std::filesystem::path& config_path, const PipelineOverrides& overrides,
                  std::ostream& out);

}  // namespace andes::cli
