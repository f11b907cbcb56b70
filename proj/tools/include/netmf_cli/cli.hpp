#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace netmf::cli {

enum class Command { kEmbed, kClosedForm, kSimulate, kSpectrum, kEval };

const char* to_string(Command command) noexcept;

// Exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitValidation = 3,
  kExitConvergence = 4,
  kExitCapacity = 5,
  kExitInternal = 70,
};

struct RunPlan {
  Command command = Command::kEmbed;

  // shared
  std::string input;
  std::string output;
  std::string report;
  int window = 10;
  double negative = 1.0;
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0: NETMF_THREADS or hardware concurrency
  bool deterministic = false;
  bool largest_component = false;
  bool drop_isolated = false;
  int max_dense = 20000;  // largest n on dense paths

  // embed
  std::string mode = "exact";  // exact | approx
  int dim = 128;
  int rank = 256;
  bool rank_given = false;
  std::string ordering = "algebraic";  // algebraic | filter
  bool full_precision = false;

  // closed-form
  std::string model = "deepwalk";  // line | deepwalk | node2vec | pte (simulate: deepwalk | node2vec)
  double p = 1.0;
  double q = 1.0;
  std::string doc_word;
  std::string label_word;
  bool log_shifted = false;

  // simulate
  std::uint64_t walks = 80;
  int length = 40;
  std::string start = "stationary";

  // spectrum
  int top = 256;
  bool top_given = false;
  std::string plot_data;
  bool bounds = false;

  // eval
  std::string embedding;
  std::string labels;
  std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int repeats = 10;
  double regularization = 1.0;
};

struct ParseOutcome {
  std::optional<RunPlan> plan;  // empty on --help or a usage error
  int exit_code = kExitOk;
  std::string message;          // help text or usage error
};

// Arguments exclude the program name.
ParseOutcome parse(const std::vector<std::string>& args);

// Executes a plan; diagnostics go to `log`. Returns the exit status.
int run(const RunPlan& plan, std::ostream& log);

// parse + run, printing help/usage text as appropriate.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netmf::cli
