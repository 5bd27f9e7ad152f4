#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace latgreen {

struct RunOptions {
  std::string config_path;
  std::string out_dir{"."};
  int threads{1};
  std::optional<std::uint64_t> seed_override;
};

// One subcommand: check, finsler, geodesic, evaluate, oracle, oz or compare.
// Artifacts go under out_dir; the same text is mirrored to `out`.  Throws the
// project error types on failure.  Returns 0, or 1 when a compare run misses
// the configured rate window.
int run_subcommand(const std::string& command, const RunOptions& opt, std::ostream& out);

// run_subcommand with errors mapped to exit codes: 2 config, 3 hypothesis,
// 4 geometry, 5 numerical, 1 anything else; messages go to `err`.
int run_cli(const std::string& command, const RunOptions& opt, std::ostream& out,
            std::ostream& err);

}  // namespace latgreen
