#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "internal.hpp"
#include "pwc/harness.hpp"

namespace pwc {

namespace {

using nlohmann::json;

constexpr int kMaxDegree = 12;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("manifest field '" + field + "': " + what);
}

const json& require(const json& doc, const char* field, const std::string& prefix = "") {
  const auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) fail(prefix + field, "missing");
  return *it;
}

template <class T>
T read(const json& value, const std::string& field) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    fail(field, std::string("wrong type (") + e.what() + ")");
  }
}

double read_number(const json& value, const std::string& field) {
  if (!value.is_number()) fail(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) fail(field, "not finite");
  return v;
}

const char* const kTables[] = {"plus_f", "plus_g", "minus_f", "minus_g"};

TriangularTable<double>& table_of(PerturbationSpec& p, int k) {
  switch (k) {
    case 0: return p.plus_f;
    case 1: return p.plus_g;
    case 2: return p.minus_f;
    default: return p.minus_g;
  }
}

const TriangularTable<double>& table_of(const PerturbationSpec& p, int k) {
  return table_of(const_cast<PerturbationSpec&>(p), k);
}

GeneratingSet parse_set(const std::string& name) {
  if (name == "lemma") return GeneratingSet::lemma;
  if (name == "realizable") return GeneratingSet::realizable;
  fail("perturbation.placed.set", "expected 'lemma' or 'realizable', got '" + name + "'");
}

PerturbationSpec load_perturbation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("perturbation.file", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("perturbation.file", std::string("parse error: ") + e.what());
  }
  return perturbation_from_json(doc);
}

PerturbationSource parse_source(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object() || doc.size() != 1) {
    fail("perturbation", "expected exactly one of 'inline', 'file', 'placed'");
  }
  PerturbationSource src;
  if (auto it = doc.find("inline"); it != doc.end()) {
    src.kind = PerturbationSource::Kind::inline_tables;
    src.spec = perturbation_from_json(*it);
  } else if (auto it = doc.find("file"); it != doc.end()) {
    src.kind = PerturbationSource::Kind::file;
    src.path = read<std::string>(*it, "perturbation.file");
    std::filesystem::path path(src.path);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    if (!std::filesystem::exists(path)) fail("perturbation.file", "'" + path.string() + "' does not exist");
    src.spec = load_perturbation_file(path);
  } else if (auto it = doc.find("placed"); it != doc.end()) {
    src.kind = PerturbationSource::Kind::placed;
    const json& p = *it;
    src.placed.degree = read<int>(require(p, "degree", "perturbation.placed."), "perturbation.placed.degree");
    for (const auto& t : require(p, "targets", "perturbation.placed.")) {
      src.placed.targets.push_back(read_number(t, "perturbation.placed.targets"));
    }
    if (auto s = p.find("set"); s != p.end()) {
      src.placed.set = parse_set(read<std::string>(*s, "perturbation.placed.set"));
    }
    if (auto w = p.find("null_weight"); w != p.end()) {
      src.placed.null_weight = read_number(*w, "perturbation.placed.null_weight");
    }
  } else {
    fail("perturbation", "expected one of 'inline', 'file', 'placed'");
  }
  return src;
}

bool uses_randomness(const ExperimentManifest& m) {
  switch (m.kind) {
    case ExperimentKind::verify_identities:
    case ExperimentKind::sweep:
      return true;
    case ExperimentKind::reproduce_hn:
    case ExperimentKind::smooth_theorem12:
      return m.draws > 0;
    case ExperimentKind::place_and_simulate:
      return m.perturbation && m.perturbation->kind == PerturbationSource::Kind::placed &&
             m.perturbation->placed.null_weight > 0.0;
  }
  return true;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::verify_identities: return "verify_identities";
    case ExperimentKind::reproduce_hn: return "reproduce_hn";
    case ExperimentKind::place_and_simulate: return "place_and_simulate";
    case ExperimentKind::smooth_theorem12: return "smooth_theorem12";
    case ExperimentKind::sweep: return "sweep";
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (auto k : {ExperimentKind::verify_identities, ExperimentKind::reproduce_hn,
                 ExperimentKind::place_and_simulate, ExperimentKind::smooth_theorem12,
                 ExperimentKind::sweep}) {
    if (to_string(k) == name) return k;
  }
  fail("kind", "unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "both";
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "both") return OutputFormat::both;
  fail("output.format", "expected csv, json or both, got '" + std::string(name) + "'");
}

json to_json(const PerturbationSpec& pert) {
  json doc;
  doc["degree"] = pert.degree();
  for (int k = 0; k < 4; ++k) {
    json triples = json::array();
    table_of(pert, k).for_each([&](int i, int j, double v) {
      if (v != 0.0) triples.push_back(json::array({i, j, v}));
    });
    doc[kTables[k]] = std::move(triples);
  }
  return doc;
}

PerturbationSpec perturbation_from_json(const json& doc) {
  if (!doc.is_object()) fail("perturbation", "expected an object");
  const int n = read<int>(require(doc, "degree", "perturbation."), "perturbation.degree");
  if (n < 1 || n > kMaxDegree) fail("perturbation.degree", "must lie in 1.." + std::to_string(kMaxDegree));
  PerturbationSpec pert(n);
  for (int k = 0; k < 4; ++k) {
    const auto it = doc.find(kTables[k]);
    if (it == doc.end()) continue;
    const std::string field = std::string("perturbation.") + kTables[k];
    if (!it->is_array()) fail(field, "expected a list of [i, j, value] triples");
    std::set<std::pair<int, int>> seen;
    for (const auto& t : *it) {
      if (!t.is_array() || t.size() != 3) fail(field, "expected [i, j, value] triples");
      const int i = read<int>(t[0], field);
      const int j = read<int>(t[1], field);
      auto& table = table_of(pert, k);
      if (!table.in_range(i, j)) {
        fail(field, "index (" + std::to_string(i) + ", " + std::to_string(j) + ") outside degree " +
                        std::to_string(n));
      }
      if (!seen.emplace(i, j).second) {
        fail(field, "duplicate index (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      table.at(i, j) = read_number(t[2], field);
    }
  }
  return pert;
}

json to_json(const BasisExpansion& e) {
  return json{{"degree", e.degree}, {"coeff_A", e.coeff_A}, {"coeff_B", e.coeff_B}, {"coeff_poly", e.coeff_poly}};
}

BasisExpansion expansion_from_json(const json& doc) {
  const int n = read<int>(require(doc, "degree", "expansion."), "expansion.degree");
  if (n < 1 || n > kMaxDegree) fail("expansion.degree", "must lie in 1.." + std::to_string(kMaxDegree));
  BasisExpansion e = BasisExpansion::zero(n);
  for (auto [name, vec] : {std::pair{"coeff_A", &e.coeff_A}, std::pair{"coeff_B", &e.coeff_B},
                           std::pair{"coeff_poly", &e.coeff_poly}}) {
    const std::string field = std::string("expansion.") + name;
    auto values = read<std::vector<double>>(require(doc, name, "expansion."), field);
    if (values.size() != vec->size()) {
      fail(field, "expected " + std::to_string(vec->size()) + " entries for degree " + std::to_string(n));
    }
    *vec = std::move(values);
  }
  return e;
}

ExperimentManifest parse_manifest(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("manifest: expected a JSON object");
  ExperimentManifest m;
  m.schema_version = read<int>(require(doc, "schema_version"), "schema_version");
  if (m.schema_version != kSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(m.schema_version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");
  }
  m.id = read<std::string>(require(doc, "id"), "id");
  m.kind = parse_kind(read<std::string>(require(doc, "kind"), "kind"));

  static const std::set<std::string> known = {"schema_version", "id", "kind", "params", "degrees",
                                              "perturbation", "epsilons", "seeds", "r_max", "r_min",
                                              "draws", "samples", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) fail(key, "unknown field");
  }

  if (auto it = doc.find("params"); it != doc.end()) {
    const double a = read_number(require(*it, "a", "params."), "params.a");
    const double b = read_number(require(*it, "b", "params."), "params.b");
    try {
      m.params = SystemParams(a, b);
    } catch (const std::invalid_argument& e) {
      fail("params", e.what());
    }
  }
  if (auto it = doc.find("degrees"); it != doc.end()) m.degrees = read<std::vector<int>>(*it, "degrees");
  if (auto it = doc.find("perturbation"); it != doc.end()) m.perturbation = parse_source(*it, base_dir);
  if (auto it = doc.find("epsilons"); it != doc.end()) {
    for (const auto& v : *it) m.epsilons.push_back(read_number(v, "epsilons"));
  }
  if (auto it = doc.find("seeds"); it != doc.end()) {
    m.seeds = read<std::vector<std::uint64_t>>(*it, "seeds");
  }
  if (auto it = doc.find("r_max"); it != doc.end()) m.r_max = read_number(*it, "r_max");
  if (auto it = doc.find("r_min"); it != doc.end()) m.r_min = read_number(*it, "r_min");
  if (auto it = doc.find("draws"); it != doc.end()) m.draws = read<int>(*it, "draws");
  if (auto it = doc.find("samples"); it != doc.end()) m.samples = read<int>(*it, "samples");
  if (auto it = doc.find("output"); it != doc.end()) {
    if (auto d = it->find("dir"); d != it->end()) m.output.dir = read<std::string>(*d, "output.dir");
    if (auto f = it->find("format"); f != it->end()) {
      m.output.format = parse_format(read<std::string>(*f, "output.format"));
    }
  }
  validate(m);
  return m;
}

std::vector<ExperimentManifest> load_manifests(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest '" + path.string() + "': " + e.what());
  }
  const auto base = path.parent_path();
  std::vector<ExperimentManifest> out;
  if (doc.is_object() && doc.contains("experiments")) {
    const auto& list = doc["experiments"];
    if (!list.is_array() || list.empty()) fail("experiments", "expected a non-empty list");
    std::set<std::string> ids;
    for (const auto& item : list) {
      out.push_back(parse_manifest(item, base));
      if (!ids.insert(out.back().id).second) fail("id", "duplicate experiment id '" + out.back().id + "'");
    }
  } else {
    out.push_back(parse_manifest(doc, base));
  }
  return out;
}

void validate(const ExperimentManifest& m) {
  if (m.schema_version != kSchemaVersion) fail("schema_version", "unsupported version");
  if (m.id.empty()) fail("id", "missing");
  for (char c : m.id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      fail("id", "use letters, digits, '-', '_' and '.' only");
    }
  }
  for (int n : m.degrees) {
    if (n < 1 || n > kMaxDegree) fail("degrees", "entries must lie in 1.." + std::to_string(kMaxDegree));
  }
  for (std::size_t k = 0; k < m.epsilons.size(); ++k) {
    if (!(m.epsilons[k] > 0.0)) fail("epsilons", "values must be positive");
    if (k > 0 && !(m.epsilons[k] < m.epsilons[k - 1])) fail("epsilons", "values must be strictly descending");
  }
  if (m.draws < 0) fail("draws", "must be non-negative");
  if (m.samples < 4) fail("samples", "must be at least 4");
  if (m.r_max < 0.0 || m.r_max >= m.params.r0()) fail("r_max", "must lie in (0, r0); 0 selects the default");
  if (m.r_min < 0.0 || (m.r_min > 0.0 && m.r_min >= effective_r_max(m))) fail("r_min", "must lie below r_max");

  if (uses_randomness(m) && m.seeds.empty()) fail("seeds", "missing (this experiment draws random numbers)");

  switch (m.kind) {
    case ExperimentKind::reproduce_hn:
    case ExperimentKind::smooth_theorem12:
    case ExperimentKind::sweep:
      if (m.degrees.empty()) fail("degrees", "missing");
      break;
    case ExperimentKind::place_and_simulate: {
      if (!m.perturbation) fail("perturbation", "missing");
      const auto& src = *m.perturbation;
      if (src.kind == PerturbationSource::Kind::placed) {
        const auto& p = src.placed;
        if (p.degree < 1 || p.degree > kMaxDegree) fail("perturbation.placed.degree", "out of range");
        if (p.targets.empty()) fail("perturbation.placed.targets", "missing");
        if (p.null_weight < 0.0) fail("perturbation.placed.null_weight", "must be non-negative");
        for (std::size_t k = 0; k < p.targets.size(); ++k) {
          if (!(p.targets[k] > 0.0 && p.targets[k] < effective_r_max(m))) {
            fail("perturbation.placed.targets", "values must lie in (0, r_max)");
          }
          if (k > 0 && !(p.targets[k] > p.targets[k - 1])) {
            fail("perturbation.placed.targets", "values must be strictly increasing");
          }
        }
      } else if (!src.spec) {
        fail(src.kind == PerturbationSource::Kind::file ? "perturbation.file" : "perturbation.inline",
             "not loaded");
      }
      break;
    }
    case ExperimentKind::verify_identities:
      break;
  }
  if (m.kind == ExperimentKind::smooth_theorem12 && m.r_max >= std::abs(m.params.a())) {
    fail("r_max", "the smooth system needs r_max < |a|");
  }
}

json to_json(const ExperimentManifest& m) {
  json doc;
  doc["schema_version"] = m.schema_version;
  doc["id"] = m.id;
  doc["kind"] = std::string(to_string(m.kind));
  doc["params"] = json{{"a", m.params.a()}, {"b", m.params.b()}};
  doc["degrees"] = m.degrees;
  if (m.perturbation) {
    const auto& src = *m.perturbation;
    if (src.kind == PerturbationSource::Kind::placed) {
      doc["perturbation"]["placed"] = json{
          {"degree", src.placed.degree},
          {"targets", src.placed.targets},
          {"set", src.placed.set == GeneratingSet::lemma ? "lemma" : "realizable"},
          {"null_weight", src.placed.null_weight}};
    } else {
      doc["perturbation"]["inline"] = to_json(*src.spec);
    }
  }
  doc["epsilons"] = m.epsilons;
  doc["seeds"] = m.seeds;
  doc["r_max"] = m.r_max;
  doc["r_min"] = m.r_min;
  doc["draws"] = m.draws;
  doc["samples"] = m.samples;
  return doc;
}

double effective_r_max(const ExperimentManifest& m) {
  if (m.r_max > 0.0) return m.r_max;
  const double scale = std::max(std::abs(m.params.a()), std::abs(m.params.b()));
  double r = std::min(m.params.default_search_bound(), 2.5 * scale);
  if (m.kind == ExperimentKind::smooth_theorem12) r = std::min(r, 0.999 * std::abs(m.params.a()));
  return r;
}

std::string inputs_digest(const ExperimentManifest& m) {
  const std::string text = to_json(m).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace pwc
