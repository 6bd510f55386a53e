#pragma once
// Command-line front end. Configs are JSON trees with units in the key names;
// every key is checked against the command's schema and every resolved value
// is echoed into manifest.json next to the CSV outputs.

#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kerrcat::cli {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// View of one config object that records the keys it reads and their
/// resolved values. finish() rejects keys that were never read.
class Section {
 public:
  Section(const json* in, json* out, std::string path);

  double number(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback,
                   const std::vector<std::string>& allowed);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  bool has(const std::string& key) const;
  Section child(const std::string& key);
  void finish() const;
  const std::string& path() const { return path_; }

 private:
  const json& raw(const std::string& key) const;
  std::string field(const std::string& key) const;

  const json* in_;
  json* out_;
  std::string path_;
  std::set<std::string> used_;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::vector<double> primary;      // values compared by --check-convergence
  std::vector<std::string> skipped;  // grid points outside the model's domain
  std::string failure;              // non-empty after a numerical failure
};

struct Context {
  unsigned threads = 1;
  bool enlarged = false;  // truncation scaled by the convergence factor
};

using Command = std::function<CommandResult(Section&, const Context&)>;

const std::vector<std::string>& command_names();
Command find_command(const std::string& name);

/// Full CLI entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace kerrcat::cli
