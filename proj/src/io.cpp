#include "catorder/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace catorder {

namespace {

constexpr std::string_view kToolVersion = "catorder 1.0.0";

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  for (auto& piece : split(s, ',')) {
    if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line_prefix(int line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::vector<double> parse_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  for (auto& piece : split(text, sep)) {
    if (piece.empty()) continue;
    double v = 0.0;
    if (!parse_double(piece, v)) throw Error(ErrorKind::Parse, "not a number: '" + piece + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

IngestResult ingest_csv_text(std::string_view text, const CsvSchema& schema) {
  std::vector<std::string> directive_responses;
  std::vector<std::string> directive_ignore;
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  char delim = schema.delimiter;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      auto directive = [&](std::string_view key, std::vector<std::string>& into) {
        if (body.rfind(key, 0) == 0) into = split_list(std::string_view(body).substr(key.size()));
      };
      directive("responses:", directive_responses);
      directive("ignore:", directive_ignore);
      continue;
    }
    if (header.empty()) {
      if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
      header = split(line, delim);
      continue;
    }
    auto fields = split(line, delim);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Parse, line_prefix(line_no) + "expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    rows.emplace_back(line_no, std::move(fields));
    if (end == text.size()) break;
  }
  if (header.empty()) throw Error(ErrorKind::Parse, "missing header line");

  auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::Parse, "no column named '" + name + "'");
    return static_cast<int>(it - header.begin());
  };

  std::vector<int> response_cols;
  if (!schema.responses.empty()) {
    for (const auto& r : schema.responses) response_cols.push_back(column_of(r));
  } else if (schema.trailing_categories) {
    const int J = *schema.trailing_categories;
    if (J < 3 || J > static_cast<int>(header.size())) throw Error(ErrorKind::Parse, "bad category count");
    for (int c = static_cast<int>(header.size()) - J; c < static_cast<int>(header.size()); ++c) {
      response_cols.push_back(c);
    }
  } else if (!directive_responses.empty()) {
    for (const auto& r : directive_responses) response_cols.push_back(column_of(r));
  } else {
    throw Error(ErrorKind::Parse,
                "cannot tell count columns apart: name them (responses) or add a '# responses:' line");
  }
  if (response_cols.size() < 3) throw Error(ErrorKind::Parse, "need at least 3 response columns");

  std::vector<bool> skip(header.size(), false);
  for (const auto& name : schema.ignore.empty() ? directive_ignore : schema.ignore) {
    skip[static_cast<std::size_t>(column_of(name))] = true;
  }
  for (int c : response_cols) skip[static_cast<std::size_t>(c)] = true;

  IngestResult result;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // expanded covariates
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (skip[c]) continue;
    bool numeric = true;
    for (const auto& [ln, f] : rows) {
      double v = 0.0;
      if (!parse_double(f[c], v)) {
        numeric = false;
        break;
      }
    }
    if (numeric) {
      std::vector<double> col;
      for (const auto& [ln, f] : rows) {
        double v = 0.0;
        parse_double(f[c], v);
        col.push_back(v);
      }
      names.push_back(header[c]);
      columns.push_back(std::move(col));
      continue;
    }
    CategoricalCoding coding{header[c], {}};
    for (const auto& [ln, f] : rows) {
      if (f[c].empty()) throw Error(ErrorKind::Parse, line_prefix(ln) + "empty value in column '" + header[c] + "'");
      if (std::find(coding.levels.begin(), coding.levels.end(), f[c]) == coding.levels.end()) {
        coding.levels.push_back(f[c]);
      }
    }
    for (std::size_t level = 1; level < coding.levels.size(); ++level) {
      std::vector<double> col;
      for (const auto& [ln, f] : rows) col.push_back(f[c] == coding.levels[level] ? 1.0 : 0.0);
      names.push_back(header[c] + ":" + coding.levels[level]);
      columns.push_back(std::move(col));
    }
    result.codings.push_back(std::move(coding));
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto J = static_cast<Eigen::Index>(response_cols.size());
  Eigen::MatrixXd x(m, static_cast<Eigen::Index>(columns.size()));
  CountMatrix counts(m, J);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& [ln, f] = rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < columns.size(); ++c) x(i, static_cast<Eigen::Index>(c)) = columns[c][static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < J; ++j) {
      const auto& field = f[static_cast<std::size_t>(response_cols[static_cast<std::size_t>(j)])];
      double v = 0.0;
      if (!parse_double(field, v) || v != std::floor(v)) {
        throw Error(ErrorKind::Parse, line_prefix(ln) + "count '" + field + "' is not an integer");
      }
      if (v < 0) throw Error(ErrorKind::Parse, line_prefix(ln) + "negative count " + field);
      counts(i, j) = static_cast<std::int64_t>(v);
    }
  }

  // Merge repeated design points, then drop empty ones.
  std::vector<int> keep;
  std::vector<int> line_of;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int ln = rows[static_cast<std::size_t>(i)].first;
    auto dup = std::find_if(keep.begin(), keep.end(), [&](int k) { return x.row(k) == x.row(i); });
    if (dup != keep.end()) {
      counts.row(*dup) += counts.row(i);
      result.warnings.push_back(line_prefix(ln) + "repeats an earlier design point; counts merged");
      continue;
    }
    keep.push_back(static_cast<int>(i));
    line_of.push_back(ln);
  }
  std::vector<int> final_rows;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    if (counts.row(keep[r]).sum() == 0) {
      result.warnings.push_back(line_prefix(line_of[r]) + "design point has no observations and is dropped");
      continue;
    }
    final_rows.push_back(keep[r]);
  }
  Eigen::MatrixXd fx(static_cast<Eigen::Index>(final_rows.size()), x.cols());
  CountMatrix fc(static_cast<Eigen::Index>(final_rows.size()), J);
  for (std::size_t r = 0; r < final_rows.size(); ++r) {
    fx.row(static_cast<Eigen::Index>(r)) = x.row(final_rows[r]);
    fc.row(static_cast<Eigen::Index>(r)) = counts.row(final_rows[r]);
  }
  std::vector<std::string> labels;
  for (int c : response_cols) labels.push_back(header[static_cast<std::size_t>(c)]);
  result.data = Dataset(std::move(fx), std::move(fc), std::move(names), std::move(labels));
  return result;
}

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema) {
  return ingest_csv_text(read_file(path), schema);
}

void write_csv(std::ostream& os, const Dataset& data) {
  os << "# responses: ";
  for (std::size_t j = 0; j < data.category_labels().size(); ++j) os << (j ? "," : "") << data.category_labels()[j];
  os << '\n';
  bool first = true;
  for (const auto& n : data.covariate_names()) {
    os << (first ? "" : ",") << n;
    first = false;
  }
  for (const auto& l : data.category_labels()) {
    os << (first ? "" : ",") << l;
    first = false;
  }
  os << '\n' << std::setprecision(17);
  for (int i = 0; i < data.rows(); ++i) {
    first = true;
    for (int c = 0; c < data.covariates(); ++c) {
      os << (first ? "" : ",") << data.x()(i, c);
      first = false;
    }
    for (int j = 0; j < data.categories(); ++j) {
      os << (first ? "" : ",") << data.counts()(i, j);
      first = false;
    }
    os << '\n';
  }
}

IngestResult load_dataset(const std::string& source, const CsvSchema& schema) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return ingest_csv_text(builtin_csv(source.substr(prefix.size())), schema);
  return ingest_csv(source, schema);
}

Dataset police_dataset() { return ingest_csv_text(builtin_csv("police")).data; }
Dataset baseline_po_dataset() { return ingest_csv_text(builtin_csv("baseline-po-sim")).data; }

// ---------------------------------------------------------------------------
// theta files

void write_theta(std::ostream& os, const Theta& theta, const ModelSpec* spec) {
  os << "# theta";
  if (spec) os << " for " << spec->name();
  os << ": beta_1 .. beta_{J-1} blocks, then zeta\n";
  os << "layout " << theta.blocks() << ' ' << theta.block_size() << ' ' << theta.shared_size() << '\n';
  os << std::setprecision(17);
  for (Eigen::Index k = 0; k < theta.values().size(); ++k) os << theta.values()(k) << '\n';
}

Theta read_theta_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int blocks = -1, block_size = -1, shared = -1;
  std::vector<double> values;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.rfind("layout", 0) == 0) {
      std::istringstream ls(t.substr(6));
      if (!(ls >> blocks >> block_size >> shared) || blocks < 1 || block_size < 1 || shared < 0) {
        throw Error(ErrorKind::Parse, line_prefix(line_no) + "bad layout line");
      }
      continue;
    }
    std::string normalized = t;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream vs(normalized);
    std::string token;
    while (vs >> token) {
      double v = 0.0;
      if (!parse_double(token, v)) throw Error(ErrorKind::Parse, line_prefix(line_no) + "not a number: '" + token + "'");
      values.push_back(v);
    }
  }
  if (blocks < 0) throw Error(ErrorKind::Parse, "theta file lacks a 'layout <blocks> <block_size> <shared>' line");
  Theta theta(blocks, block_size, shared);
  if (static_cast<int>(values.size()) != theta.size()) {
    throw Error(ErrorKind::DimensionMismatch, "theta file has " + std::to_string(values.size()) +
                                                  " values, layout needs " + std::to_string(theta.size()));
  }
  theta.values() = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return theta;
}

Theta read_theta(const std::string& path) { return read_theta_text(read_file(path)); }

// ---------------------------------------------------------------------------
// plans

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, line_prefix(line_no) + "expected 'key = value'");
    kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) { return parse_key_values(read_file(path)); }

void write_manifest(std::ostream& os, const KeyValues& kv) {
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

ExperimentPlan experiment_plan_from(const KeyValues& kv) {
  auto require = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::Parse, "plan lacks '" + key + "'");
    return it->second;
  };
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };

  std::vector<std::vector<double>> design_rows;
  for (auto& row : split(require("design"), ';')) {
    if (!row.empty()) design_rows.push_back(parse_numbers(row));
  }
  if (design_rows.empty()) throw Error(ErrorKind::Parse, "empty design");
  const auto d = design_rows.front().size();
  Eigen::MatrixXd design(static_cast<Eigen::Index>(design_rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < design_rows.size(); ++i) {
    if (design_rows[i].size() != d) throw Error(ErrorKind::Parse, "design rows differ in length");
    for (std::size_t c = 0; c < d; ++c) design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = design_rows[i][c];
  }

  const int J = std::stoi(require("categories"));
  std::vector<int> shared;
  for (double s : parse_numbers(get("shared", ""))) shared.push_back(static_cast<int>(s) - 1);
  const Family family = parse_family(require("family"));
  const Odds odds = parse_odds(require("odds"));
  ModelSpec spec(family, odds, J, static_cast<int>(d), shared);

  const auto theta_values = parse_numbers(require("theta"));
  Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(theta_values.data(), static_cast<Eigen::Index>(theta_values.size()));
  Theta theta0(spec, tv);
  if (kv.count("zeta_scale")) theta0.zeta() *= std::stod(kv.at("zeta_scale"));

  Eigen::VectorXd weights = Eigen::VectorXd::Ones(design.rows());
  if (kv.count("weights")) {
    const auto w = parse_numbers(kv.at("weights"));
    weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  }

  std::vector<std::string> labels = split_list(get("labels", ""));
  if (labels.empty()) {
    for (int j = 0; j < J; ++j) labels.push_back(std::to_string(j + 1));
  }
  const Permutation sigma0 = kv.count("order") ? Permutation::parse(kv.at("order")) : Permutation::identity(J);

  const std::string alloc = get("allocation", "random");
  if (alloc != "random" && alloc != "fixed") throw Error(ErrorKind::Parse, "allocation must be 'random' or 'fixed'");

  ExperimentPlan plan{
      SimulationPlan{spec, theta0, sigma0, design, weights, std::stoll(require("total")),
                     alloc == "fixed" ? Allocation::FixedProportional : Allocation::RandomIID,
                     kv.count("seed") ? std::stoull(kv.at("seed")) : 0, labels, {}},
      ModelSpec(parse_family(get("fit_family", std::string(to_string(family)))),
                parse_odds(get("fit_odds", std::string(to_string(odds)))), J, static_cast<int>(d),
                parse_odds(get("fit_odds", std::string(to_string(odds)))) == Odds::PPO ? shared : std::vector<int>{}),
      std::stoi(get("replicates", "1")),
      kv.count("seed") ? std::stoull(kv.at("seed")) : 0};
  plan.simulation.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// reports

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> coefficient_names(const ModelSpec& spec, const Dataset& data) {
  std::vector<std::string> names;
  for (int j = 0; j < spec.logits(); ++j) {
    names.push_back("beta" + std::to_string(j + 1) + ":(Intercept)");
    for (int c : spec.specific_covariates()) {
      names.push_back("beta" + std::to_string(j + 1) + ":" + data.covariate_names()[static_cast<std::size_t>(c)]);
    }
  }
  for (int c : spec.shared_covariates()) names.push_back("zeta:" + data.covariate_names()[static_cast<std::size_t>(c)]);
  return names;
}

ordered_json spec_json(const ModelSpec& spec) {
  ordered_json j;
  j["family"] = std::string(to_string(spec.family()));
  j["odds"] = std::string(to_string(spec.odds()));
  j["categories"] = spec.categories();
  j["covariates"] = spec.covariates();
  j["parameters"] = spec.parameter_count();
  return j;
}

ordered_json fit_json(const FitResult& fit) {
  ordered_json j;
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["feasible"] = fit.feasible;
  j["separation_suspected"] = fit.separation_suspected;
  j["gradient_norm"] = fit.gradient_norm;
  j["message"] = fit.message;
  return j;
}

std::string fmt(double v, int precision = 2) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

void print_fit(std::ostream& os, const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
               const FitResult& fit) {
  os << "model        " << spec.name() << " (p = " << spec.parameter_count() << ")\n"
     << "order        " << sigma.to_labels(data.category_labels()) << "\n"
     << "observations " << data.total() << " over " << data.rows() << " design points\n"
     << "loglik       " << fmt(fit.loglik, 4) << "  (with multinomial constant "
     << fmt(fit.loglik + data.log_multinomial_constant(), 4) << ")\n"
     << "AIC          " << fmt(fit.aic) << "  (with constant " << fmt(fit.aic - 2.0 * data.log_multinomial_constant())
     << ")\n"
     << "BIC          " << fmt(fit.bic) << "\n"
     << "status       " << fit.message << "\n"
     << "feasible     " << (fit.feasible ? "yes" : "no") << "\n"
     << "max |score|  " << std::scientific << std::setprecision(2) << fit.gradient_norm << std::defaultfloat << "\n\n";
  const auto names = coefficient_names(spec, data);
  std::size_t width = 0;
  for (const auto& n : names) width = std::max(width, n.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    os << "  " << std::left << std::setw(static_cast<int>(width)) << names[k] << std::right << std::setw(14)
       << fmt(fit.theta.values()(static_cast<Eigen::Index>(k)), 4) << '\n';
  }
}

void print_search(std::ostream& os, const OrderSearchResult& result, const Dataset& data) {
  const double constant = data.log_multinomial_constant();
  os << "model   " << result.spec.name() << "\n"
     << "rule    " << describe(result.rule) << "\n"
     << "classes " << result.classes.size() << "\n\n";
  os << std::setw(5) << "rank" << "  " << std::left << std::setw(28) << "representative" << std::right
     << std::setw(8) << "members" << std::setw(14) << "loglik" << std::setw(11) << "AIC" << std::setw(11) << "BIC"
     << std::setw(12) << "AIC(full)" << "  status\n";
  for (const auto& c : result.classes) {
    os << std::setw(5) << c.rank << "  " << std::left << std::setw(28)
       << c.order_class.representative.to_labels(result.labels) << std::right << std::setw(8)
       << c.order_class.members.size() << std::setw(14) << fmt(c.loglik(), 4) << std::setw(11) << fmt(c.aic())
       << std::setw(11) << fmt(c.bic()) << std::setw(12) << fmt(c.aic() - 2.0 * constant) << "  "
       << (c.usable() ? (c.fit->separation_suspected ? "ok, separation suspected" : "ok") : c.failure) << '\n';
  }
  os << "\nbest order: " << describe_best_orders(result) << '\n';
  const auto ties = result.near_ties();
  if (!ties.empty()) {
    os << "within " << result.near_tie_delta << " AIC of the best:";
    for (const auto* t : ties) os << ' ' << t->order_class.representative.to_labels(result.labels);
    os << '\n';
  }
}

void print_model_table(std::ostream& os, const std::vector<ModelSummary>& rows, double log_constant) {
  os << std::left << std::setw(26) << "Model" << std::right << std::setw(12) << "AIC" << std::setw(12) << "AIC(full)"
     << "  Best order\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(26) << r.spec.name() << std::right;
    if (r.available) {
      os << std::setw(12) << fmt(r.best_aic) << std::setw(12) << fmt(r.best_aic - 2.0 * log_constant) << "  "
         << r.best_orders;
    } else {
      os << std::setw(12) << "NA" << std::setw(12) << "NA" << "  NA";
    }
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << '\n';
  }
}

void print_classes(std::ostream& os, const ModelSpec& spec, const EquivalenceClasses& classes,
                   const std::vector<std::string>& labels) {
  std::size_t orders = 0;
  for (const auto& c : classes.classes) orders += c.members.size();
  os << spec.name() << ", J = " << classes.categories << ": " << classes.classes.size()
     << (classes.classes.size() == 1 ? " class" : " classes") << " (" << orders << " orders) - "
     << describe(classes.rule) << " [" << to_string(classes.rule) << "]\n";
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    const auto& cls = classes.classes[c];
    os << std::setw(4) << c + 1 << "  ";
    for (std::size_t k = 0; k < cls.members.size(); ++k) {
      os << (k ? " " : "") << cls.members[k].to_labels(labels);
    }
    os << '\n';
  }
}

std::string fit_report_json(const ModelSpec& spec, const Dataset& data, const Permutation& sigma,
                            const FitResult& fit) {
  ordered_json j;
  j["model"] = spec_json(spec);
  j["order"] = sigma.to_labels(data.category_labels());
  j["fit"] = fit_json(fit);
  j["log_multinomial_constant"] = data.log_multinomial_constant();
  ordered_json coef = ordered_json::object();
  const auto names = coefficient_names(spec, data);
  for (std::size_t k = 0; k < names.size(); ++k) coef[names[k]] = fit.theta.values()(static_cast<Eigen::Index>(k));
  j["theta"] = coef;
  j["provenance"] = {{"tool", kToolVersion}};
  return j.dump(2);
}

std::string search_report_json(const OrderSearchResult& result, const Dataset& data) {
  ordered_json j;
  j["model"] = spec_json(result.spec);
  j["rule"] = std::string(to_string(result.rule));
  j["log_multinomial_constant"] = data.log_multinomial_constant();
  ordered_json classes = ordered_json::array();
  for (const auto& c : result.classes) {
    ordered_json cj;
    cj["rank"] = c.rank;
    cj["representative"] = c.order_class.representative.to_labels(result.labels);
    ordered_json members = ordered_json::array();
    for (const auto& m : c.order_class.members) members.push_back(m.to_labels(result.labels));
    cj["members"] = members;
    cj["usable"] = c.usable();
    if (c.fit) cj["fit"] = fit_json(*c.fit);
    if (!c.failure.empty()) cj["failure"] = c.failure;
    classes.push_back(cj);
  }
  j["classes"] = classes;
  j["best"] = describe_best_orders(result);
  j["provenance"] = {{"tool", kToolVersion}};
  return j.dump(2);
}

std::string model_table_json(const std::vector<ModelSummary>& rows, double log_constant) {
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json rj;
    rj["model"] = r.spec.name();
    rj["available"] = r.available;
    if (r.available) {
      rj["aic"] = r.best_aic;
      rj["aic_full"] = r.best_aic - 2.0 * log_constant;
      rj["bic"] = r.best_bic;
      rj["loglik"] = r.best_loglik;
      rj["best_order"] = r.best_orders;
    }
    rj["failed_classes"] = r.failed_classes;
    if (!r.note.empty()) rj["note"] = r.note;
    j.push_back(rj);
  }
  ordered_json out;
  out["models"] = j;
  out["provenance"] = {{"tool", kToolVersion}};
  return out.dump(2);
}

}  // namespace catorder
