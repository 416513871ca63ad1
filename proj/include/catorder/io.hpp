#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catorder/crossval.hpp"
#include "catorder/fit.hpp"
#include "catorder/selection.hpp"
#include "catorder/simulation.hpp"

namespace catorder {

/// Hints for reading a wide count table. Without hints the file's
/// "# responses: a,b,c" directive names the count columns.
struct CsvSchema {
  std::vector<std::string> responses;      // count column names
  std::optional<int> trailing_categories;  // or: the last J columns are counts
  std::vector<std::string> ignore;         // columns to skip, e.g. a total column
  char delimiter = 0;                      // 0 = tab if the header has one, else comma
};

/// Dummy coding of one string-valued covariate; levels in order of first
/// appearance, the first one is the reference.
struct CategoricalCoding {
  std::string column;
  std::vector<std::string> levels;
};

struct IngestResult {
  Dataset data;
  std::vector<CategoricalCoding> codings;
  std::vector<std::string> warnings;
};

IngestResult ingest_csv_text(std::string_view text, const CsvSchema& schema = {});
IngestResult ingest_csv(const std::string& path, const CsvSchema& schema = {});

/// Writes covariates (after dummy expansion) and counts with a responses
/// directive, so ingest(write(d)) reproduces d.
void write_csv(std::ostream& os, const Dataset& data);

/// Built-in datasets: "police" and "baseline-po-sim".
std::string_view builtin_csv(std::string_view name);
Dataset police_dataset();
Dataset baseline_po_dataset();

/// Loads "builtin:<name>" or a file path.
IngestResult load_dataset(const std::string& source, const CsvSchema& schema = {});

// ---- theta files: "layout <blocks> <block_size> <shared>" then values ----
void write_theta(std::ostream& os, const Theta& theta, const ModelSpec* spec = nullptr);
Theta read_theta_text(std::string_view text);
Theta read_theta(const std::string& path);

// ---- key = value plan files ----
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::string& path);

struct ExperimentPlan {
  SimulationPlan simulation;
  ModelSpec fit_spec;
  int replicates = 1;
  std::uint64_t seed = 0;
};

/// Keys: family, odds, categories, design ("1;2;3" rows, "," within a row),
/// weights, theta, order, total, allocation (random|fixed), seed, labels,
/// shared, zeta_scale, fit_family, fit_odds, replicates.
ExperimentPlan experiment_plan_from(const KeyValues& kv);
void write_manifest(std::ostream& os, const KeyValues& kv);

// ---- reports ----
std::vector<double> parse_numbers(std::string_view text, char sep = ',');

void print_fit(std::ostream& os, const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
               const FitResult& fit);
void print_search(std::ostream& os, const OrderSearchResult& result, const Dataset& data);
void print_model_table(std::ostream& os, const std::vector<ModelSummary>& rows, double log_constant);
void print_classes(std::ostream& os, const ModelSpec& spec, const EquivalenceClasses& classes,
                   const std::vector<std::string>& labels);

std::string fit_report_json(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                            const FitResult& fit);
std::string search_report_json(const OrderSearchResult& result, const Dataset& data);
std::string model_table_json(const std::vector<ModelSummary>& rows, double log_constant);

}  // namespace catorder
