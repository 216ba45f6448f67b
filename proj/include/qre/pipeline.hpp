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

#ifndef QRE_PIPELINE_HPP_
#define QRE_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qre/features.hpp"
#include "qre/measures.hpp"
#include "qre/states.hpp"
#include "qre/svm.hpp"

namespace qre {

// End-to-end orchestration: dataset generation, labeling, training,
// evaluation, perturbation studies and report rendering, with durable
// seeded artifacts on disk (JSON Lines datasets, JSON models/manifests,
// CSV/markdown reports).

// --- Records -----------------------------------------------------------------

enum class Split { kTrain, kTest };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

// One dataset row. `id` is a stable content hash of the canonical recipe
// JSON, so regenerating a dataset reproduces the same ids and files are
// canonically ordered by id. `error` carries a per-record labeling failure
// in-line; such records keep label == nullopt and are skipped downstream.
struct DatasetRecord {
  std::uint64_t id = 0;
  StateRecipe recipe;
  std::string schema_id;
  RVec features;
  std::optional<MeasureLabel> label;
  std::optional<std::string> error;
  Split split = Split::kTrain;
};

void to_json(nlohmann::json& j, const DatasetRecord& record);
void from_json(const nlohmann::json& j, DatasetRecord& record);

// FNV-1a 64-bit hash; ids and artifact hashes are rendered as 16-digit hex.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);
std::uint64_t parse_hex64(const std::string& text);

// --- Dataset generation ------------------------------------------------------

// System identifiers: "qubits-2" .. "qubits-5" (coherence studies),
// "qutrit-pair", "4x4", "four-qubit" (entanglement studies).
std::vector<int> system_dims(const std::string& system);

// Suites:
//   "coherence"              round(0.6 N) convex mixtures of pure states,
//                            round(0.2 N) Haar pure, remainder pure+diagonal
//                            convex combinations (qubit systems only)
//   "entanglement"           mixtures of a Haar pure state with a random
//                            fully separable state (entanglement systems)
//   "entanglement-class1"    Werner, isotropic, Haar pure and noisy
//                            phi-family states plus local-unitary orbits of
//                            each, in a fixed rotation (qutrit pairs only);
//                            all records are assigned to the training split
//   "entanglement-class1-general"    same composition, all-test split
//   "entanglement-class1-werner"     Werner sweep f in [-1, 0], all-test
//   "entanglement-class1-isotropic"  isotropic sweep F in [1/9, 1], all-test
//   "entanglement-class1-purenoisy"  Haar pure + white noise, all-test
struct GenSpec {
  std::string system;
  std::string suite;
  long count = 0;
  std::uint64_t seed = 0;
};

// Builds recipes, realizes each state and extracts features. Records are
// returned sorted by id with splits already assigned (75/25 by default,
// overridden by the class-1 suite rules above).
std::vector<DatasetRecord> gen_dataset(const GenSpec& spec);

// Pure function of (id, split_seed): records are ranked by a mix of their id
// with the seed and the first round(fraction * N) become Train. Exact to
// +/- 1 record and split-pure by construction.
void assign_splits(std::vector<DatasetRecord>& records, double train_fraction,
                   std::uint64_t split_seed);

// --- Labeling ----------------------------------------------------------------

struct LabelStats {
  long labeled = 0;
  long failed = 0;
  std::vector<std::string> failures;  // "id: message" per failed record
};

// Labels every unlabeled record with `measure`, re-realizing the stored
// recipe. L1/relative-entropy coherence use closed forms (method Analytic);
// geometric coherence and entanglement solve SDPs (method Sdp) at tolerance
// `tol`. Per-record failures are recorded in-line and the run continues.
// `workers` >= 1 threads; results are independent of the thread count.
LabelStats label_dataset(std::vector<DatasetRecord>& records, Measure measure,
                         double tol, int workers);

// --- Dataset IO --------------------------------------------------------------

// JSON Lines, one record per line, sorted by id; atomic replace via a
// temporary file in the same directory.
void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset(const std::string& path);

// FNV-1a hash of a file's bytes, as 16-digit hex. MissingArtifacts if absent.
std::string hash_file(const std::string& path);

// --- Training / evaluation ---------------------------------------------------

// Rows of (features, label value) for records in `split` (or all records if
// nullopt) that carry a label and no error.
void dataset_matrix(const std::vector<DatasetRecord>& records,
                    std::optional<Split> split, RMat* x, RVec* y,
                    std::vector<std::uint64_t>* ids);

struct TrainOutcome {
  SvrModel model;
  GridSearchResult search;
  long n_train = 0;
};

// Cross-validated grid search over the Train split followed by a final fit
// with the winning configuration. `dataset_hash` is stored on the model.
TrainOutcome train_on_dataset(const std::vector<DatasetRecord>& records,
                              ModelKind kind, const SearchGrid& grid, int folds,
                              std::uint64_t seed, const std::string& dataset_hash);

struct EvalOutcome {
  EvalReport report;
  std::vector<std::uint64_t> ids;
  RVec y_true;
  RVec y_pred;
};

// Predicts over the chosen split and scores with the standard metrics.
// `perturb_level` > 0 applies multiplicative feature noise per record with a
// per-record stream seeded by mix(perturb_seed, id). Empty selections throw
// MissingArtifacts; schema mismatches throw SchemaMismatch.
EvalOutcome eval_on_dataset(const SvrModel& model,
                            const std::vector<DatasetRecord>& records,
                            std::optional<Split> split, double perturb_level,
                            std::uint64_t perturb_seed);

// --- CLI ---------------------------------------------------------------------

// Entry point behind tools/qre. Subcommands: gen, label, train, eval,
// perturb-eval, report. Returns 0 on success, 1 on usage or runtime errors,
// 2 when the labeling failure budget (1% of records, at least one) is
// exceeded. Every command writes `<out>.manifest.json` echoing its
// parameters and the hashes of the artifacts it produced.
int run_cli(int argc, const char* const* argv);

}  // namespace qre

#endif  // QRE_PIPELINE_HPP_
