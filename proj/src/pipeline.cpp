// Copyright 2026 The qre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qre/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qre/errors.hpp"

namespace qre {

namespace fs = std::filesystem;

// --- Records -----------------------------------------------------------------

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
  }
  throw ParamOutOfRange("unknown split");
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw SchemaMismatch("unknown split '" + name + "'");
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::uint64_t parse_hex64(const std::string& text) {
  if (text.size() != 16 || text.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw SchemaMismatch("malformed record id '" + text + "'");
  return std::stoull(text, nullptr, 16);
}

void to_json(nlohmann::json& j, const DatasetRecord& record) {
  j = nlohmann::json{{"id", hex64(record.id)},
                     {"recipe", record.recipe},
                     {"schema", record.schema_id},
                     {"split", to_string(record.split)}};
  j["features"] = std::vector<double>(record.features.data(),
                                      record.features.data() + record.features.size());
  if (record.label) {
    j["label"] = *record.label;
    j["method"] = to_string(record.label->method);
  } else {
    j["label"] = nullptr;
    j["method"] = nullptr;
  }
  if (record.error) j["error"] = *record.error;
}

void from_json(const nlohmann::json& j, DatasetRecord& record) {
  record.id = parse_hex64(j.at("id").get<std::string>());
  record.recipe = j.at("recipe").get<StateRecipe>();
  record.schema_id = j.at("schema").get<std::string>();
  const auto values = j.at("features").get<std::vector<double>>();
  record.features = Eigen::Map<const RVec>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (j.contains("label") && !j.at("label").is_null())
    record.label = j.at("label").get<MeasureLabel>();
  else
    record.label.reset();
  if (j.contains("error") && !j.at("error").is_null())
    record.error = j.at("error").get<std::string>();
  else
    record.error.reset();
  record.split = split_from_string(j.at("split").get<std::string>());
}

static std::uint64_t recipe_id(const StateRecipe& recipe) {
  return fnv1a(nlohmann::json(recipe).dump());
}

// --- Dataset generation ------------------------------------------------------

std::vector<int> system_dims(const std::string& system) {
  if (system == "qubits-2") return {2, 2};
  if (system == "qubits-3") return {2, 2, 2};
  if (system == "qubits-4") return {2, 2, 2, 2};
  if (system == "qubits-5") return {2, 2, 2, 2, 2};
  if (system == "qutrit-pair") return {3, 3};
  if (system == "4x4") return {4, 4};
  if (system == "four-qubit") return {2, 2, 2, 2};
  throw UnsupportedSystem("unknown system '" + system + "'");
}

static bool is_qubit_system(const std::string& system) {
  return system.rfind("qubits-", 0) == 0;
}

// Number of pure components in the random convex mixtures, per system size.
static int coherence_mixture_terms(int n_qubits) {
  switch (n_qubits) {
    case 2: return 8;
    case 3: return 6;
    case 4: return 35;
    case 5: return 50;
    default: throw UnsupportedSystem("coherence suite supports 2..5 qubits");
  }
}

static StateRecipe coherence_recipe(const GenSpec& spec, const std::vector<int>& dims,
                                    long index) {
  const long n_mixed = std::lround(0.6 * static_cast<double>(spec.count));
  const long n_pure = std::lround(0.2 * static_cast<double>(spec.count));
  StateRecipe recipe;
  recipe.dims = dims;
  recipe.seed = Rng::mix(spec.seed, static_cast<std::uint64_t>(index));
  if (index < n_mixed) {
    recipe.family = StateFamily::kConvexMixture;
    recipe.params["k"] = coherence_mixture_terms(static_cast<int>(dims.size()));
  } else if (index < n_mixed + n_pure) {
    recipe.family = StateFamily::kHaarPure;
  } else {
    recipe.family = StateFamily::kPureDiagMix;
  }
  return recipe;
}

// Class-1 entanglement rotation: Werner, isotropic, Haar pure and noisy
// phi-family states, each followed by a local-unitary orbit of a fresh draw
// from the same family.
static StateRecipe class1_recipe(const GenSpec& spec, const std::vector<int>& dims,
                                 long index) {
  Rng prng(Rng::mix(spec.seed ^ 0x5eed5eed5eed5eedull, static_cast<std::uint64_t>(index)));
  const std::uint64_t state_seed = Rng::mix(spec.seed, static_cast<std::uint64_t>(index));
  const int slot = static_cast<int>(index % 8);
  StateRecipe base;
  base.dims = dims;
  base.seed = Rng::mix(spec.seed, 0x100000ull + static_cast<std::uint64_t>(index));
  switch (slot / 2) {
    case 0:
      base.family = StateFamily::kWerner;
      base.params["f"] = -1.0 + 2.0 * prng.uniform();
      break;
    case 1:
      base.family = StateFamily::kIsotropic;
      base.params["F"] = 1.0 / 9.0 + (8.0 / 9.0) * prng.uniform();
      break;
    case 2:
      base.family = StateFamily::kHaarPure;
      break;
    default:
      base.family = ((index / 8) % 2 == 0) ? StateFamily::kPhi1Noisy
                                           : StateFamily::kPhi2Noisy;
      break;
  }
  if (slot % 2 == 0) {
    base.seed = state_seed;
    return base;
  }
  StateRecipe orbit;
  orbit.family = StateFamily::kLocalUnitaryOrbit;
  orbit.dims = dims;
  orbit.seed = state_seed;
  orbit.base = std::make_shared<StateRecipe>(std::move(base));
  return orbit;
}

static StateRecipe entanglement_recipe(const GenSpec& spec, const std::vector<int>& dims,
                                       long index) {
  Rng prng(Rng::mix(spec.seed ^ 0x5eed5eed5eed5eedull, static_cast<std::uint64_t>(index)));
  StateRecipe recipe;
  recipe.dims = dims;
  recipe.seed = Rng::mix(spec.seed, static_cast<std::uint64_t>(index));
  if (spec.suite == "entanglement") {
    recipe.family = StateFamily::kSeparableMix;
    recipe.params["k"] = 10;
  } else if (spec.suite == "entanglement-class1" || spec.suite == "entanglement-class1-general") {
    return class1_recipe(spec, dims, index);
  } else if (spec.suite == "entanglement-class1-werner") {
    recipe.family = StateFamily::kWerner;
    recipe.params["f"] = -1.0 + prng.uniform();
  } else if (spec.suite == "entanglement-class1-isotropic") {
    recipe.family = StateFamily::kIsotropic;
    recipe.params["F"] = 1.0 / 9.0 + (8.0 / 9.0) * prng.uniform();
  } else if (spec.suite == "entanglement-class1-purenoisy") {
    recipe.family = StateFamily::kPureNoisy;
  } else {
    throw UnsupportedSystem("unknown suite '" + spec.suite + "'");
  }
  return recipe;
}

std::vector<DatasetRecord> gen_dataset(const GenSpec& spec) {
  if (spec.count < 0) throw ParamOutOfRange("count must be >= 0");
  const std::vector<int> dims = system_dims(spec.system);
  const bool coherence = spec.suite == "coherence";
  const bool class1 = spec.suite.rfind("entanglement-class1", 0) == 0;
  if (coherence && !is_qubit_system(spec.system))
    throw UnsupportedSystem("coherence suite requires a qubits-N system");
  if (!coherence && is_qubit_system(spec.system))
    throw UnsupportedSystem("entanglement suites require qutrit-pair, 4x4 or four-qubit");
  if (class1 && spec.system != "qutrit-pair")
    throw UnsupportedSystem("class-1 entanglement suites are defined on qutrit-pair");

  std::vector<DatasetRecord> records;
  records.reserve(static_cast<std::size_t>(spec.count));
  for (long i = 0; i < spec.count; ++i) {
    DatasetRecord record;
    record.recipe = coherence ? coherence_recipe(spec, dims, i)
                              : entanglement_recipe(spec, dims, i);
    record.id = recipe_id(record.recipe);
    const DensityMatrix rho = record.recipe.realize();
    const FeatureVector fv = coherence ? coherence_features(rho) : entanglement_features(rho);
    record.schema_id = fv.schema_id;
    record.features = fv.values;
    records.push_back(std::move(record));
  }

  if (spec.suite == "coherence" || spec.suite == "entanglement") {
    assign_splits(records, 0.75, Rng::mix(spec.seed, 0xa111ce5ull));
  } else {
    const Split split = (spec.suite == "entanglement-class1") ? Split::kTrain : Split::kTest;
    for (DatasetRecord& r : records) r.split = split;
  }
  std::sort(records.begin(), records.end(),
            [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
  return records;
}

void assign_splits(std::vector<DatasetRecord>& records, double train_fraction,
                   std::uint64_t split_seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ParamOutOfRange("train_fraction must lie in [0, 1]");
  const long n = static_cast<long>(records.size());
  const long n_train = std::lround(train_fraction * static_cast<double>(n));
  std::vector<long> order(records.size());
  for (long i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    const std::uint64_t ka = Rng::mix(split_seed, records[static_cast<std::size_t>(a)].id);
    const std::uint64_t kb = Rng::mix(split_seed, records[static_cast<std::size_t>(b)].id);
    if (ka != kb) return ka < kb;
    return records[static_cast<std::size_t>(a)].id < records[static_cast<std::size_t>(b)].id;
  });
  for (long r = 0; r < n; ++r)
    records[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])].split =
        r < n_train ? Split::kTrain : Split::kTest;
}

// --- Labeling ----------------------------------------------------------------

static MeasureLabel compute_label(const DensityMatrix& rho, Measure measure, double tol) {
  MeasureLabel label;
  label.measure = measure;
  switch (measure) {
    case Measure::kL1Coherence:
      label.value = c_l1(rho);
      label.method = LabelMethod::kAnalytic;
      label.tolerance = 1e-12;
      break;
    case Measure::kRelEntCoherence:
      label.value = c_rel_ent(rho);
      label.method = LabelMethod::kAnalytic;
      label.tolerance = 1e-12;
      break;
    case Measure::kGeomCoherence:
      label.value = c_geometric(rho, tol);
      label.method = LabelMethod::kSdp;
      label.tolerance = tol;
      break;
    case Measure::kGeomEntanglement:
      label.value = eg_lower(rho, all_bipartitions(static_cast<int>(rho.dims().size())), tol);
      label.method = LabelMethod::kSdp;
      label.tolerance = tol;
      break;
  }
  return label;
}

LabelStats label_dataset(std::vector<DatasetRecord>& records, Measure measure,
                         double tol, int workers) {
  if (tol <= 0.0) throw ParamOutOfRange("label tolerance must be positive");
  if (workers < 1) throw ParamOutOfRange("workers must be >= 1");
  const long n = static_cast<long>(records.size());
  auto label_one = [&](long i) {
    DatasetRecord& record = records[static_cast<std::size_t>(i)];
    if (record.label && record.label->measure == measure) return;
    try {
      const DensityMatrix rho = record.recipe.realize();
      record.label = compute_label(rho, measure, tol);
      record.error.reset();
    } catch (const Error& e) {
      record.label.reset();
      record.error = e.what();
    }
  };
  if (workers == 1 || n < 2) {
    for (long i = 0; i < n; ++i) label_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (long i = w; i < n; i += workers) label_one(i);
      });
    for (std::thread& t : pool) t.join();
  }
  LabelStats stats;
  for (const DatasetRecord& record : records) {
    if (record.label && record.label->measure == measure) {
      ++stats.labeled;
    } else if (record.error) {
      ++stats.failed;
      stats.failures.push_back(hex64(record.id) + ": " + *record.error);
    }
  }
  return stats;
}

// --- Dataset IO --------------------------------------------------------------

static void atomic_write(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::vector<const DatasetRecord*> ordered;
  ordered.reserve(records.size());
  for (const DatasetRecord& r : records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const DatasetRecord* a, const DatasetRecord* b) { return a->id < b->id; });
  std::string out;
  for (const DatasetRecord* r : ordered) {
    out += nlohmann::json(*r).dump();
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifacts("dataset '" + path + "' not found");
  std::vector<DatasetRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<DatasetRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaMismatch("bad record at " + path + ":" + std::to_string(line_no) +
                           ": " + e.what());
    }
  }
  return records;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifacts("artifact '" + path + "' not found");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return hex64(fnv1a(buffer.str()));
}

// --- Training / evaluation ---------------------------------------------------

void dataset_matrix(const std::vector<DatasetRecord>& records,
                    std::optional<Split> split, RMat* x, RVec* y,
                    std::vector<std::uint64_t>* ids) {
  std::vector<const DatasetRecord*> rows;
  for (const DatasetRecord& r : records) {
    if (split && r.split != *split) continue;
    if (!r.label || r.error) continue;
    rows.push_back(&r);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n > 0 ? rows[0]->features.size() : 0;
  *x = RMat(n, d);
  *y = RVec(n);
  if (ids) ids->clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    const DatasetRecord& r = *rows[static_cast<std::size_t>(i)];
    if (r.features.size() != d)
      throw DimensionMismatch("inconsistent feature lengths in dataset");
    x->row(i) = r.features.transpose();
    (*y)(i) = r.label->value;
    if (ids) ids->push_back(r.id);
  }
}

TrainOutcome train_on_dataset(const std::vector<DatasetRecord>& records,
                              ModelKind kind, const SearchGrid& grid, int folds,
                              std::uint64_t seed, const std::string& dataset_hash) {
  RMat x;
  RVec y;
  dataset_matrix(records, Split::kTrain, &x, &y, nullptr);
  if (x.rows() == 0) throw MissingArtifacts("no labeled training records");
  TrainOutcome outcome;
  outcome.n_train = x.rows();
  outcome.search = grid_search(kind, x, y, grid, folds, seed);
  outcome.model = kind == ModelKind::kSvr ? train_svr(x, y, outcome.search.best)
                                          : train_svqr(x, y, outcome.search.best);
  for (const DatasetRecord& r : records) {
    if (r.label && !r.error) {
      outcome.model.schema_id = r.schema_id;
      break;
    }
  }
  outcome.model.train_hash = dataset_hash;
  return outcome;
}

EvalOutcome eval_on_dataset(const SvrModel& model,
                            const std::vector<DatasetRecord>& records,
                            std::optional<Split> split, double perturb_level,
                            std::uint64_t perturb_seed) {
  EvalOutcome outcome;
  std::vector<const DatasetRecord*> rows;
  for (const DatasetRecord& r : records) {
    if (split && r.split != *split) continue;
    if (!r.label || r.error) continue;
    if (!model.schema_id.empty() && r.schema_id != model.schema_id)
      throw SchemaMismatch("model schema '" + model.schema_id +
                           "' does not match dataset schema '" + r.schema_id + "'");
    rows.push_back(&r);
  }
  if (rows.empty()) throw MissingArtifacts("no labeled records to evaluate");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  RMat x(n, rows[0]->features.size());
  outcome.y_true = RVec(n);
  outcome.ids.reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const DatasetRecord& r = *rows[static_cast<std::size_t>(i)];
    if (r.features.size() != x.cols())
      throw DimensionMismatch("inconsistent feature lengths in dataset");
    RVec values = r.features;
    if (perturb_level > 0.0) {
      FeatureVector fv{r.schema_id, values};
      values = perturb_features(fv, perturb_level, Rng::mix(perturb_seed, r.id)).values;
    }
    x.row(i) = values.transpose();
    outcome.y_true(i) = r.label->value;
    outcome.ids.push_back(r.id);
  }
  outcome.y_pred = predict(model, x);
  outcome.report = evaluate(outcome.y_true, outcome.y_pred);
  return outcome;
}

// --- CLI ---------------------------------------------------------------------

namespace {

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const nlohmann::json& params, const std::string& started,
                    const nlohmann::json& extra,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json manifest{{"command", command},
                          {"params", params},
                          {"started", started},
                          {"finished", iso_utc_now()}};
  for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
  nlohmann::json hashes = nlohmann::json::object();
  for (const std::string& path : artifacts) hashes[path] = hash_file(path);
  manifest["artifacts"] = hashes;
  atomic_write(out_path + ".manifest.json", manifest.dump(1) + "\n");
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct GenArgs {
  std::string system, suite, out;
  long count = 0;
  std::uint64_t seed = 0;
};

int cmd_gen(const GenArgs& a) {
  const std::string started = iso_utc_now();
  const std::vector<DatasetRecord> records =
      gen_dataset(GenSpec{a.system, a.suite, a.count, a.seed});
  write_dataset(a.out, records);
  std::map<std::string, long> families;
  long n_train = 0;
  for (const DatasetRecord& r : records) {
    ++families[to_string(r.recipe.family)];
    if (r.split == Split::kTrain) ++n_train;
  }
  const nlohmann::json params{{"system", a.system}, {"suite", a.suite},
                              {"count", a.count},   {"seed", a.seed},
                              {"out", a.out}};
  const nlohmann::json extra{{"families", families},
                             {"n_train", n_train},
                             {"n_test", static_cast<long>(records.size()) - n_train}};
  write_manifest(a.out, "gen", params, started, extra, {a.out});
  std::cout << "wrote " << records.size() << " records to " << a.out << "\n";
  return 0;
}

struct LabelArgs {
  std::string in, out, measure;
  double tol = 1e-7;
  int workers = 1;
};

int cmd_label(const LabelArgs& a) {
  const std::string started = iso_utc_now();
  const std::string out = a.out.empty() ? a.in : a.out;
  std::vector<DatasetRecord> records = read_dataset(a.in);
  const Measure measure = measure_from_string(a.measure);
  const LabelStats stats = label_dataset(records, measure, a.tol, a.workers);
  write_dataset(out, records);
  const nlohmann::json params{{"in", a.in},   {"out", out},
                              {"measure", a.measure}, {"tol", a.tol},
                              {"workers", a.workers}};
  const nlohmann::json extra{{"labeled", stats.labeled},
                             {"failed", stats.failed},
                             {"failures", stats.failures}};
  write_manifest(out, "label", params, started, extra, {out});
  std::cout << "labeled " << stats.labeled << " records (" << stats.failed
            << " failures) -> " << out << "\n";
  const long budget = std::max<long>(1, static_cast<long>(records.size()) / 100);
  if (stats.failed > budget) {
    std::cerr << "error: " << stats.failed << " labeling failures exceed budget of "
              << budget << "\n";
    return 2;
  }
  return 0;
}

std::vector<double> parse_grid_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParamOutOfRange(std::string("bad ") + what + " grid entry '" + item + "'");
    }
  }
  if (values.empty()) throw ParamOutOfRange(std::string(what) + " grid is empty");
  return values;
}

struct TrainArgs {
  std::string in, out, kind = "svr";
  std::string c_grid, eps_grid, tau_grid;
  double delta = 0.02;
  int folds = 5;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
  const std::string started = iso_utc_now();
  const std::vector<DatasetRecord> records = read_dataset(a.in);
  const std::string dataset_hash = hash_file(a.in);
  ModelKind kind;
  if (a.kind == "svr") {
    kind = ModelKind::kSvr;
  } else if (a.kind == "svqr") {
    kind = ModelKind::kSvqr;
  } else {
    throw ParamOutOfRange("model kind must be svr or svqr");
  }
  SearchGrid grid;
  if (!a.c_grid.empty()) grid.cs = parse_grid_list(a.c_grid, "C");
  if (!a.eps_grid.empty()) grid.epsilons = parse_grid_list(a.eps_grid, "epsilon");
  if (!a.tau_grid.empty()) grid.taus = parse_grid_list(a.tau_grid, "tau");
  grid.delta = a.delta;
  const TrainOutcome outcome =
      train_on_dataset(records, kind, grid, a.folds, a.seed, dataset_hash);
  if (!outcome.model.converged)
    std::cerr << "warning: final fit hit the iteration cap (c=" << outcome.search.best.c
              << ", epsilon=" << outcome.search.best.epsilon
              << ", tau=" << outcome.search.best.kernel.tau << ")\n";
  save_model(outcome.model, a.out);
  nlohmann::json cv_table = nlohmann::json::array();
  for (const GridPoint& p : outcome.search.table)
    cv_table.push_back({{"c", p.config.c},
                        {"epsilon", p.config.epsilon},
                        {"tau", p.config.kernel.tau},
                        {"cv_mse", p.cv_mse}});
  const std::string cv_path = a.out + ".cv.json";
  atomic_write(cv_path, nlohmann::json{{"best",
                                        {{"c", outcome.search.best.c},
                                         {"epsilon", outcome.search.best.epsilon},
                                         {"tau", outcome.search.best.kernel.tau},
                                         {"delta", outcome.search.best.delta}}},
                                       {"table", cv_table}}
                             .dump(1) +
                             "\n");
  const nlohmann::json params{{"in", a.in},         {"out", a.out},
                              {"kind", a.kind},     {"c_grid", a.c_grid},
                              {"eps_grid", a.eps_grid}, {"tau_grid", a.tau_grid},
                              {"delta", a.delta},   {"folds", a.folds},
                              {"seed", a.seed}};
  const nlohmann::json extra{{"n_train", outcome.n_train},
                             {"dataset_hash", dataset_hash},
                             {"converged", outcome.model.converged}};
  write_manifest(a.out, "train", params, started, extra, {a.out, cv_path});
  std::cout << "trained " << a.kind << " on " << outcome.n_train << " records -> "
            << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string model, in, out, split = "test";
  double level = 0.0;
  std::uint64_t seed = 0;
  bool perturb = false;
};

int cmd_eval(const EvalArgs& a) {
  const std::string started = iso_utc_now();
  const SvrModel model = load_model(a.model);
  const std::vector<DatasetRecord> records = read_dataset(a.in);
  std::optional<Split> split;
  if (a.split != "all") split = split_from_string(a.split);
  const EvalOutcome outcome =
      eval_on_dataset(model, records, split, a.perturb ? a.level : 0.0, a.seed);
  std::string measure = "unknown";
  for (const DatasetRecord& r : records) {
    if (r.label) {
      measure = to_string(r.label->measure);
      break;
    }
  }
  const nlohmann::json report{{"dataset", a.in},
                              {"model", a.model},
                              {"model_kind", model.kind == ModelKind::kSvr ? "svr" : "svqr"},
                              {"schema", model.schema_id},
                              {"measure", measure},
                              {"split", a.split},
                              {"level", a.perturb ? a.level : 0.0},
                              {"metrics", outcome.report}};
  const std::string report_path = a.out + ".report.json";
  atomic_write(report_path, report.dump(1) + "\n");
  std::string csv = "id,true,predicted,residual\n";
  for (Eigen::Index i = 0; i < outcome.y_true.size(); ++i) {
    csv += hex64(outcome.ids[static_cast<std::size_t>(i)]);
    csv += ',';
    csv += format_g(outcome.y_true(i));
    csv += ',';
    csv += format_g(outcome.y_pred(i));
    csv += ',';
    csv += format_g(outcome.y_pred(i) - outcome.y_true(i));
    csv += '\n';
  }
  const std::string csv_path = a.out + ".predictions.csv";
  atomic_write(csv_path, csv);
  nlohmann::json params{{"model", a.model}, {"in", a.in},  {"out", a.out},
                        {"split", a.split}, {"level", a.perturb ? a.level : 0.0}};
  if (a.perturb) params["seed"] = a.seed;
  write_manifest(a.out, a.perturb ? "perturb-eval" : "eval", params, started,
                 nlohmann::json{{"n", outcome.report.n}}, {report_path, csv_path});
  std::cout << "evaluated " << outcome.report.n << " records: mse="
            << outcome.report.mse << " r2=" << outcome.report.r2
            << " p_over=" << outcome.report.p_over << " -> " << report_path << "\n";
  return 0;
}

struct ReportArgs {
  std::string dir, out;
};

int cmd_report(const ReportArgs& a) {
  const std::string started = iso_utc_now();
  if (!fs::is_directory(a.dir)) throw MissingArtifacts("run directory '" + a.dir + "' not found");
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(a.dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.rfind(".report.json") == name.size() - 12)
      paths.push_back(entry.path().string());
  }
  if (paths.empty())
    throw MissingArtifacts("no *.report.json files under '" + a.dir + "'");
  std::sort(paths.begin(), paths.end());
  struct Row {
    std::string schema, measure, kind, split, dataset, model;
    double level = 0.0;
    nlohmann::json metrics;
  };
  std::vector<Row> rows;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    Row row;
    row.schema = j.value("schema", "");
    row.measure = j.value("measure", "");
    row.kind = j.value("model_kind", "");
    row.split = j.value("split", "");
    row.dataset = fs::path(j.value("dataset", "")).filename().string();
    row.model = fs::path(j.value("model", "")).filename().string();
    row.level = j.value("level", 0.0);
    row.metrics = j.at("metrics");
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.schema, x.measure, x.kind, x.level, x.split, x.dataset, x.model) <
           std::tie(y.schema, y.measure, y.kind, y.level, y.split, y.dataset, y.model);
  });
  auto metric = [](const nlohmann::json& m, const char* key) -> std::string {
    if (!m.contains(key) || m.at(key).is_null()) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", m.at(key).get<double>());
    return std::string(buf);
  };
  std::string md = "# Evaluation summary\n\n";
  md += "| schema | measure | model | split | level | n | mse | mape | r2 | p_over |\n";
  md += "|---|---|---|---|---|---|---|---|---|---|\n";
  std::string csv = "schema,measure,model_kind,split,level,n,mse,mape,r2,p_over,dataset,model\n";
  for (const Row& r : rows) {
    const std::string n = std::to_string(r.metrics.value("n", 0));
    char level_buf[32];
    std::snprintf(level_buf, sizeof(level_buf), "%g", r.level);
    md += "| " + r.schema + " | " + r.measure + " | " + r.kind + " | " + r.split +
          " | " + level_buf + " | " + n + " | " + metric(r.metrics, "mse") + " | " +
          metric(r.metrics, "mape") + " | " + metric(r.metrics, "r2") + " | " +
          metric(r.metrics, "p_over") + " |\n";
    csv += r.schema + "," + r.measure + "," + r.kind + "," + r.split + "," + level_buf +
           "," + n + "," + metric(r.metrics, "mse") + "," + metric(r.metrics, "mape") +
           "," + metric(r.metrics, "r2") + "," + metric(r.metrics, "p_over") + "," +
           r.dataset + "," + r.model + "\n";
  }
  const std::string out = a.out.empty() ? (fs::path(a.dir) / "report").string() : a.out;
  atomic_write(out + ".md", md);
  atomic_write(out + ".csv", csv);
  const nlohmann::json params{{"dir", a.dir}, {"out", out}};
  write_manifest(out, "report", params, started,
                 nlohmann::json{{"n_reports", rows.size()}}, {out + ".md", out + ".csv"});
  std::cout << "rendered " << rows.size() << " report rows -> " << out << ".md\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"direct estimation pipeline: generate, label, train, evaluate"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a dataset of state recipes");
  gen_cmd->add_option("--system", gen.system,
                      "qubits-2..qubits-5, qutrit-pair, 4x4 or four-qubit")->required();
  gen_cmd->add_option("--suite", gen.suite,
                      "coherence, entanglement or entanglement-class1[-general|"
                      "-werner|-isotropic|-purenoisy]")->required();
  gen_cmd->add_option("--count", gen.count, "number of records")->required();
  gen_cmd->add_option("--seed", gen.seed, "master seed");
  gen_cmd->add_option("--out", gen.out, "output JSONL path")->required();

  LabelArgs label;
  CLI::App* label_cmd = app.add_subcommand("label", "label a dataset with one measure");
  label_cmd->add_option("--in", label.in, "input JSONL path")->required();
  label_cmd->add_option("--measure", label.measure,
                        "l1_coherence, rel_ent_coherence, geom_coherence or "
                        "geom_entanglement")->required();
  label_cmd->add_option("--tol", label.tol, "solver tolerance");
  label_cmd->add_option("--workers", label.workers, "worker threads");
  label_cmd->add_option("--out", label.out, "output path (default: rewrite input)");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "cross-validated model training");
  train_cmd->add_option("--in", train.in, "labeled JSONL path")->required();
  train_cmd->add_option("--kind", train.kind, "svr or svqr");
  train_cmd->add_option("--c-grid", train.c_grid, "comma-separated C values");
  train_cmd->add_option("--eps-grid", train.eps_grid, "comma-separated epsilon values");
  train_cmd->add_option("--tau-grid", train.tau_grid, "comma-separated tau values");
  train_cmd->add_option("--delta", train.delta, "quantile level for svqr");
  train_cmd->add_option("--folds", train.folds, "cross-validation folds");
  train_cmd->add_option("--seed", train.seed, "fold shuffle seed");
  train_cmd->add_option("--out", train.out, "output model JSON path")->required();

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a model on a dataset split");
  eval_cmd->add_option("--model", eval.model, "model JSON path")->required();
  eval_cmd->add_option("--in", eval.in, "labeled JSONL path")->required();
  eval_cmd->add_option("--split", eval.split, "train, test or all");
  eval_cmd->add_option("--out", eval.out, "output prefix")->required();

  EvalArgs perturb;
  perturb.perturb = true;
  perturb.level = 0.02;
  CLI::App* perturb_cmd =
      app.add_subcommand("perturb-eval", "evaluate under multiplicative feature noise");
  perturb_cmd->add_option("--model", perturb.model, "model JSON path")->required();
  perturb_cmd->add_option("--in", perturb.in, "labeled JSONL path")->required();
  perturb_cmd->add_option("--split", perturb.split, "train, test or all");
  perturb_cmd->add_option("--level", perturb.level, "relative noise level");
  perturb_cmd->add_option("--seed", perturb.seed, "perturbation seed");
  perturb_cmd->add_option("--out", perturb.out, "output prefix")->required();

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "summarize stored eval reports");
  report_cmd->add_option("--dir", report.dir, "run directory")->required();
  report_cmd->add_option("--out", report.out, "output prefix (default: <dir>/report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (label_cmd->parsed()) return cmd_label(label);
    if (train_cmd->parsed()) return cmd_train(train);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (perturb_cmd->parsed()) return cmd_eval(perturb);
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace qre
