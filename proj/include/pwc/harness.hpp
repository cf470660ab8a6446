#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pwc/averaged_function.hpp"
#include "pwc/errors.hpp"
#include "pwc/poincare_sim.hpp"
#include "pwc/system_params.hpp"
#include "pwc/zero_analysis.hpp"

namespace pwc {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ExperimentKind { verify_identities, reproduce_hn, place_and_simulate, smooth_theorem12, sweep };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError on an unknown name.
ExperimentKind parse_kind(std::string_view name);

enum class OutputFormat { csv, json, both };

std::string_view to_string(OutputFormat format);
OutputFormat parse_format(std::string_view name);

/// Zeros placed on a generating set and realized as a perturbation.
struct PlacedTargets {
  int degree = 1;
  std::vector<double> targets;
  GeneratingSet set = GeneratingSet::realizable;
  double null_weight = 0.0;
};

struct PerturbationSource {
  enum class Kind { inline_tables, file, placed };
  Kind kind = Kind::inline_tables;
  std::optional<PerturbationSpec> spec;  // inline_tables, and file once loaded
  std::string path;                      // file
  PlacedTargets placed;                  // placed
};

struct OutputSpec {
  std::string dir;  // empty: nothing written
  OutputFormat format = OutputFormat::both;
};

/// One experiment. Stored as JSON:
///
///   {
///     "schema_version": 1,
///     "id": "hn-default",
///     "kind": "reproduce_hn",
///     "params": {"a": 1.0, "b": -2.0},
///     "degrees": [1, 2, 3, 4],
///     "perturbation": {"inline": {"degree": 1, "plus_f": [[0, 0, 1.0]], ...}}
///                   | {"file": "pert.json"}
///                   | {"placed": {"degree": 1, "targets": [...], "set": "realizable",
///                                 "null_weight": 0.0}},
///     "epsilons": [4e-3, 2e-3, 1e-3],
///     "seeds": [1],
///     "r_max": 5.0, "r_min": 0.05, "draws": 50, "samples": 200,
///     "output": {"dir": "out", "format": "both"}
///   }
///
/// Only schema_version, id and kind are always required; kinds that need a
/// perturbation, epsilons or seeds require those too (see validate).
struct ExperimentManifest {
  int schema_version = kSchemaVersion;
  std::string id;
  ExperimentKind kind = ExperimentKind::verify_identities;
  SystemParams params{1.0, -2.0};
  std::vector<int> degrees;
  std::optional<PerturbationSource> perturbation;
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  double r_max = 0.0;  // 0: min(default_search_bound, 2.5 max(|a|, |b|)), below |a| when smooth
  double r_min = 0.0;  // 0: 0.01 r_max
  int draws = 0;
  int samples = 200;
  OutputSpec output;
};

/// Throws ConfigError naming the offending field. `base_dir` resolves
/// relative perturbation file paths; the file is loaded here.
ExperimentManifest parse_manifest(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});

/// A file holds one manifest or {"experiments": [...]}.
std::vector<ExperimentManifest> load_manifests(const std::filesystem::path& path);

/// Checks the invariants: referenced file loaded, epsilons positive and
/// strictly descending, seeds present where randomness is used, degrees in
/// 1..12, r_max inside the annulus. Throws ConfigError.
void validate(const ExperimentManifest& manifest);

/// Canonical form (keys sorted, file perturbations inlined, output omitted).
nlohmann::json to_json(const ExperimentManifest& manifest);

nlohmann::json to_json(const PerturbationSpec& pert);
/// Throws ConfigError on malformed triples or indices outside the degree.
PerturbationSpec perturbation_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const BasisExpansion& expansion);
BasisExpansion expansion_from_json(const nlohmann::json& doc);

enum class CheckStatus { pass, fail, finding };

std::string_view to_string(CheckStatus status);

/// measured against expected within tolerance; findings record facts that
/// differ from a stated expectation without counting as failures.
struct Check {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ResultRecord {
  std::string experiment_id;
  ExperimentKind kind = ExperimentKind::verify_identities;
  std::string inputs_digest;  // FNV-1a 64 of the canonical manifest JSON, hex
  std::string tool_version{kToolVersion};
  std::vector<Check> checks;
  std::vector<Table> tables;

  bool passed() const;
  const Table* table(std::string_view name) const;
};

/// Downstream failure inside an experiment, tagged with the module it came from.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(std::string module, const std::string& what);
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

/// Runs the experiment and, when manifest.output.dir is set, writes its
/// tables. Throws ConfigError for an invalid manifest and ExperimentError
/// for numerical failures.
ResultRecord run_manifest(const ExperimentManifest& manifest);

/// Records sorted by experiment id.
std::vector<ResultRecord> run_manifests(const std::vector<ExperimentManifest>& manifests);

Table zero_table(const ZeroReport& report, std::string name = "zeros");
Table displacement_table(const std::vector<DisplacementSample>& samples,
                         std::string name = "displacement");

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

/// RFC 4180: header row, CRLF line ends, fields quoted when needed.
std::string to_csv(const Table& table);
std::string checks_csv(const ResultRecord& record);

/// {"payload": {...}, "meta": {...}}; the payload depends only on the
/// manifest, the timestamp lives in meta.
nlohmann::json payload_json(const ResultRecord& record);
ResultRecord record_from_json(const nlohmann::json& payload);
std::string to_json_text(const ResultRecord& record, std::string_view timestamp);

/// Writes <dir>/<id>.json and/or <dir>/<id>_checks.csv plus one
/// <dir>/<id>_<table>.csv per table. Returns the written paths.
std::vector<std::filesystem::path> emit_table(const ResultRecord& record,
                                              const std::filesystem::path& dir, OutputFormat format);

enum class LogLevel { quiet, info, debug };

/// From PWCYCLES_LOG (quiet, info, debug); info when unset.
LogLevel log_level_from_env();
void log_message(LogLevel level, std::string_view message);

}  // namespace pwc
