// pwcycles: run averaging / limit-cycle experiments from a manifest or flags.
//
// Exit codes: 0 all checks pass (findings allowed), 1 a check failed,
// 2 configuration error, 3 runtime or numerical error.

#include <CLI11.hpp>
#include <iomanip>
#include <iostream>

#include "pwc/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string format = "both";
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> epsilons;
  double a = 1.0;
  double b = -2.0;
  std::vector<int> degrees;
  std::vector<double> targets;
  int degree = 1;
  std::string set = "realizable";
  double null_weight = 0.0;
  int draws = -1;
  double r_max = 0.0;
  double r_min = 0.0;
  int samples = 200;
  bool quiet = false;
};

pwc::ExperimentManifest from_flags(const Flags& f, pwc::ExperimentKind kind, const std::string& id) {
  nlohmann::json doc{{"schema_version", pwc::kSchemaVersion},
                     {"id", id},
                     {"kind", std::string(pwc::to_string(kind))},
                     {"params", {{"a", f.a}, {"b", f.b}}},
                     {"seeds", f.seeds},
                     {"r_max", f.r_max},
                     {"r_min", f.r_min},
                     {"samples", f.samples}};
  if (!f.degrees.empty()) {
    doc["degrees"] = f.degrees;
  } else if (kind == pwc::ExperimentKind::reproduce_hn) {
    doc["degrees"] = {1, 2, 3, 4};
  } else if (kind == pwc::ExperimentKind::smooth_theorem12) {
    doc["degrees"] = {2, 3};
  } else if (kind == pwc::ExperimentKind::sweep) {
    doc["degrees"] = {1, 2, 3};
  }
  if (!f.epsilons.empty()) doc["epsilons"] = f.epsilons;
  if (f.draws >= 0) doc["draws"] = f.draws;
  if (kind == pwc::ExperimentKind::place_and_simulate) {
    doc["perturbation"]["placed"] = {
        {"degree", f.degree}, {"targets", f.targets}, {"set", f.set}, {"null_weight", f.null_weight}};
  }
  return pwc::parse_manifest(doc);
}

void print_record(const pwc::ResultRecord& rec) {
  std::cout << rec.experiment_id << " [" << pwc::to_string(rec.kind) << "] digest " << rec.inputs_digest << '\n';
  for (const auto& c : rec.checks) {
    std::string status(pwc::to_string(c.status));
    for (auto& ch : status) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    std::cout << "  " << std::left << std::setw(8) << status << c.name << ": measured "
              << pwc::format_double(c.measured) << ", expected " << pwc::format_double(c.expected);
    if (c.tolerance > 0) std::cout << " +- " << pwc::format_double(c.tolerance);
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged functions and limit cycles of a perturbed piecewise cubic center"};
  app.require_subcommand(1);
  Flags f;

  struct Command {
    const char* name;
    const char* help;
    pwc::ExperimentKind kind;
  };
  const Command commands[] = {
      {"verify", "kernel, averaging and integrator identity checks", pwc::ExperimentKind::verify_identities},
      {"reproduce-hn", "attain and bound the zero counts H(n)", pwc::ExperimentKind::reproduce_hn},
      {"place", "place zeros and realize them as a perturbation", pwc::ExperimentKind::place_and_simulate},
      {"simulate", "place zeros and locate the limit cycles by simulation", pwc::ExperimentKind::place_and_simulate},
      {"smooth", "zero counts of the smooth system", pwc::ExperimentKind::smooth_theorem12},
      {"sweep", "random perturbations across degrees and seeds", pwc::ExperimentKind::sweep},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", f.config, "manifest file (JSON); overrides the experiment flags")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--format", f.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--seed", f.seeds, "random seeds")->delimiter(',');
    sub->add_option("--epsilon", f.epsilons, "epsilon values, descending")->delimiter(',');
    sub->add_option("--a", f.a, "constant a");
    sub->add_option("--b", f.b, "constant b");
    sub->add_option("--degrees", f.degrees, "perturbation degrees")->delimiter(',');
    sub->add_option("--draws", f.draws, "random draws per seed");
    sub->add_option("--r-max", f.r_max, "search radius (0: default)");
    sub->add_option("--r-min", f.r_min, "smallest simulated radius (0: 0.01 r_max)");
    sub->add_option("--samples", f.samples, "return map samples");
    sub->add_flag("--quiet", f.quiet, "print nothing but the exit status");
    if (c.kind == pwc::ExperimentKind::place_and_simulate) {
      sub->add_option("--degree", f.degree, "degree of the placed perturbation");
      sub->add_option("--targets", f.targets, "zero locations")->delimiter(',');
      sub->add_option("--set", f.set, "generating set")->check(CLI::IsMember({"lemma", "realizable"}));
      sub->add_option("--null-weight", f.null_weight, "weight of a random null-space component");
    }
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Command* chosen = nullptr;
  for (const auto& [sub, cmd] : subs) {
    if (sub->parsed()) chosen = cmd;
  }

  std::vector<pwc::ResultRecord> records;
  try {
    std::vector<pwc::ExperimentManifest> manifests;
    if (!f.config.empty()) {
      manifests = pwc::load_manifests(f.config);
      for (const auto& m : manifests) {
        if (m.kind != chosen->kind) {
          throw pwc::ConfigError("manifest '" + m.id + "' has kind " + std::string(pwc::to_string(m.kind)) +
                                 ", not " + std::string(pwc::to_string(chosen->kind)));
        }
      }
    } else {
      if (std::string(chosen->name) == "simulate" && f.epsilons.empty()) f.epsilons = {4e-3, 2e-3, 1e-3};
      if (std::string(chosen->name) == "place") f.epsilons.clear();
      manifests.push_back(from_flags(f, chosen->kind, chosen->name));
    }
    for (auto& m : manifests) {
      if (!f.out.empty()) m.output.dir = f.out;
      if (!f.out.empty() || m.output.dir.empty()) m.output.format = pwc::parse_format(f.format);
    }
    records = pwc::run_manifests(manifests);
  } catch (const pwc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }

  bool ok = true;
  for (const auto& rec : records) {
    if (!f.quiet) print_record(rec);
    ok = ok && rec.passed();
  }
  return ok ? 0 : 1;
}
