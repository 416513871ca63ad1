// Command line front end: fit, search, classes, transform, simulate,
// experiment and cv. Usage errors exit with 2, computation errors with 1.
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "catorder/io.hpp"
#include "catorder/stats.hpp"

using namespace catorder;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "catorder 1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  std::string family = "baseline";
  std::string odds = "po";
  std::string shared;  // ppo shared covariates, 1-based indices or names
};

void add_model_options(CLI::App* cmd, ModelOptions& m, bool required = true) {
  auto* f = cmd->add_option("--family", m.family, "baseline|cumulative|adjacent|continuation")
                ->check(CLI::IsMember({"baseline", "cumulative", "adjacent", "continuation"}));
  auto* o = cmd->add_option("--odds", m.odds, "po|npo|ppo")->check(CLI::IsMember({"po", "npo", "ppo"}));
  if (required) {
    f->required();
    o->required();
  }
  cmd->add_option("--ppo-shared", m.shared, "covariates with a common effect (ppo): 1-based indices or names");
}

std::vector<int> shared_columns(const std::string& text, const std::vector<std::string>& names) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto it = std::find(names.begin(), names.end(), tok);
    if (it != names.end()) {
      out.push_back(static_cast<int>(it - names.begin()));
      continue;
    }
    try {
      std::size_t used = 0;
      const int k = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(k - 1);
    } catch (const std::exception&) {
      throw UsageError("--ppo-shared: unknown covariate '" + tok + "'");
    }
  }
  return out;
}

ModelSpec make_spec(const ModelOptions& m, int categories, int covariates, const std::vector<std::string>& names) {
  const Odds odds = parse_odds(m.odds);
  std::vector<int> shared;
  if (odds == Odds::PPO) {
    if (m.shared.empty()) throw UsageError("--odds ppo needs --ppo-shared");
    shared = shared_columns(m.shared, names);
  }
  return ModelSpec(parse_family(m.family), odds, categories, covariates, shared);
}

Permutation parse_order(const std::string& text, const std::vector<std::string>& labels, int J) {
  if (text.empty()) return Permutation::identity(J);
  bool numeric = text.find_first_not_of("0123456789, ") == std::string::npos;
  Permutation p;
  if (numeric) {
    try {
      p = Permutation::parse(text);
    } catch (const Error&) {
      numeric = false;
    }
  }
  if (!numeric) p = Permutation::parse_labels(text, labels);
  if (p.size() != J) throw UsageError("order '" + text + "' has " + std::to_string(p.size()) + " entries, need " + std::to_string(J));
  return p;
}

void write_out(const std::string& path, const std::string& content) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
  out << content << '\n';
}

ordered_json with_provenance(const std::string& report, const ordered_json& config,
                             std::optional<std::uint64_t> seed = std::nullopt) {
  ordered_json j = ordered_json::parse(report);
  ordered_json prov;
  prov["tool"] = kVersion;
  prov["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  prov["config"] = config;
  j["provenance"] = prov;
  return j;
}

ordered_json fit_config_json(const FitConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"gradient_tolerance", c.gradient_tolerance},
          {"max_step_halvings", c.max_step_halvings},
          {"separation_threshold", c.separation_threshold}};
}

IngestResult load(const std::string& source) {
  auto r = load_dataset(source);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return r;
}

std::string mean_sd(const std::vector<double>& v) {
  std::vector<double> ok;
  for (double x : v) {
    if (std::isfinite(x)) ok.push_back(x);
  }
  if (ok.empty()) return "NA";
  const double mean = std::accumulate(ok.begin(), ok.end(), 0.0) / static_cast<double>(ok.size());
  double ss = 0.0;
  for (double x : ok) ss += (x - mean) * (x - mean);
  const double sd = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
  std::ostringstream os;
  os << std::setprecision(6) << mean << " (sd " << sd << ", " << ok.size() << "/" << v.size() << " usable)";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order selection for multinomial logit models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string data_path, out_path, order_text, theta_path, from_text, to_text, plan_path, labels_text,
      save_theta;
  std::vector<std::string> cv_orders;
  ModelOptions model;
  std::optional<std::uint64_t> seed;
  int J = 4, reps = 100, threads = 0, max_iter = 200;
  std::uint64_t replicate = 0;
  double train_fraction = 2.0 / 3.0;
  bool all_models = false;

  auto* fit = app.add_subcommand("fit", "fit one model at one order");
  fit->add_option("--data", data_path, "CSV file or builtin:police / builtin:baseline-po-sim")->required();
  add_model_options(fit, model);
  fit->add_option("--order", order_text, "order as 2,1,3,4 or as labels t,s,o,st");
  fit->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  fit->add_option("--save-theta", save_theta, "write the estimate as a theta file");
  fit->add_option("--out", out_path, "JSON report");

  auto* search = app.add_subcommand("search", "fit every order and rank the classes by AIC");
  search->add_option("--data", data_path)->required();
  add_model_options(search, model, false);
  search->add_flag("--all-models", all_models, "po and npo for all four families");
  search->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
  search->add_option("--out", out_path, "JSON report");

  auto* classes = app.add_subcommand("classes", "list the likelihood-equivalent classes of orders");
  add_model_options(classes, model);
  classes->add_option("--J", J, "number of categories")->check(CLI::Range(3, kMaxCategories));
  classes->add_option("--labels", labels_text, "category labels, comma separated");
  classes->add_option("--out", out_path, "JSON report");

  auto* transform = app.add_subcommand("transform", "map theta between two equivalent orders");
  add_model_options(transform, model);
  transform->add_option("--theta", theta_path, "theta file")->required();
  transform->add_option("--from", from_text)->required();
  transform->add_option("--to", to_text)->required();
  transform->add_option("--out", out_path, "theta file to write instead of stdout");

  auto* simulate = app.add_subcommand("simulate", "draw a dataset from a plan");
  simulate->add_option("--plan", plan_path)->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--replicate", replicate);
  simulate->add_option("--out", out_path, "CSV file to write instead of stdout");

  auto* experiment = app.add_subcommand("experiment", "simulate, search all orders, locate the true order");
  experiment->add_option("--plan", plan_path)->required();
  experiment->add_option("--seed", seed, "overrides the plan's seed");
  experiment->add_option("--reps", reps, "replicates (default: the plan's)")->check(CLI::PositiveNumber);
  experiment->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
  experiment->add_option("--out", out_path, "JSON report");

  auto* cv = app.add_subcommand("cv", "cross-entropy loss over repeated random splits");
  cv->add_option("--data", data_path)->required();
  add_model_options(cv, model);
  cv->add_option("--order", cv_orders, "one or more orders; the first is tested against the rest")->required();
  cv->add_option("--reps", reps)->check(CLI::PositiveNumber);
  cv->add_option("--seed", seed)->required();
  cv->add_option("--train-fraction", train_fraction)->check(CLI::Range(0.0, 1.0));
  cv->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
  cv->add_option("--out", out_path, "JSON report");

  bool experiment_reps_given = false;
  try {
    app.parse(argc, argv);
    experiment_reps_given = experiment->count("--reps") > 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    FitConfig config;
    config.max_iterations = max_iter;
    SearchOptions options;
    options.threads = static_cast<unsigned>(threads);

    if (*fit) {
      const auto in = load(data_path);
      const Dataset& data = in.data;
      const ModelSpec spec = make_spec(model, data.categories(), data.covariates(), data.covariate_names());
      const Permutation sigma = parse_order(order_text, data.category_labels(), data.categories());
      const FitResult result = fit_mle(spec, data, sigma, config);
      print_fit(std::cout, spec, data, sigma, result);
      if (!save_theta.empty()) {
        std::ofstream th(save_theta);
        write_theta(th, result.theta, &spec);
      }
      write_out(out_path, with_provenance(fit_report_json(spec, data, sigma, result), fit_config_json(config)).dump(2));
      return 0;
    }

    if (*search) {
      const auto in = load(data_path);
      const Dataset& data = in.data;
      if (all_models) {
        const auto rows = search_all_models(data, standard_models(data.categories(), data.covariates()), config, options);
        print_model_table(std::cout, rows, data.log_multinomial_constant());
        write_out(out_path, with_provenance(model_table_json(rows, data.log_multinomial_constant()),
                                            fit_config_json(config)).dump(2));
        return 0;
      }
      if (!search->count("--family") || !search->count("--odds")) {
        throw UsageError("search needs --family and --odds, or --all-models");
      }
      const ModelSpec spec = make_spec(model, data.categories(), data.covariates(), data.covariate_names());
      const auto result = search_orders(spec, data, config, options);
      print_search(std::cout, result, data);
      write_out(out_path, with_provenance(search_report_json(result, data), fit_config_json(config)).dump(2));
      return 0;
    }

    if (*classes) {
      std::vector<std::string> labels;
      if (!labels_text.empty()) {
        std::stringstream ss(labels_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) labels.push_back(tok);
        if (static_cast<int>(labels.size()) != J) throw UsageError("--labels needs exactly J labels");
      } else {
        for (int j = 1; j <= J; ++j) labels.push_back(std::to_string(j));
      }
      if (parse_odds(model.odds) == Odds::PPO && model.shared.empty()) model.shared = "1";
      const ModelSpec spec(parse_family(model.family), parse_odds(model.odds), J,
                           parse_odds(model.odds) == Odds::PPO ? 2 : 1,
                           parse_odds(model.odds) == Odds::PPO ? std::vector<int>{0} : std::vector<int>{});
      const auto eq = equivalence_classes(spec);
      print_classes(std::cout, spec, eq, labels);
      ordered_json j;
      j["family"] = model.family;
      j["odds"] = model.odds;
      j["categories"] = J;
      j["rule"] = std::string(to_string(eq.rule));
      j["description"] = std::string(describe(eq.rule));
      ordered_json arr = ordered_json::array();
      for (const auto& c : eq.classes) {
        ordered_json members = ordered_json::array();
        for (const auto& m : c.members) members.push_back(m.to_labels(labels));
        arr.push_back({{"representative", c.representative.to_labels(labels)}, {"members", members}});
      }
      j["classes"] = arr;
      j["provenance"] = {{"tool", kVersion}};
      write_out(out_path, j.dump(2));
      return 0;
    }

    if (*transform) {
      const Theta theta = read_theta(theta_path);
      const int categories = theta.blocks() + 1;
      const Odds odds = parse_odds(model.odds);
      int d = 0;
      std::vector<int> shared;
      switch (odds) {
        case Odds::PO:
          d = theta.shared_size();
          break;
        case Odds::NPO:
          d = theta.block_size() - 1;
          break;
        case Odds::PPO:
          d = theta.block_size() - 1 + theta.shared_size();
          for (int c = theta.block_size() - 1; c < d; ++c) shared.push_back(c);
          break;
      }
      const ModelSpec spec(parse_family(model.family), odds, categories, d, shared);
      if (!theta.matches(spec)) throw Error(ErrorKind::DimensionMismatch, "theta layout does not fit --odds " + model.odds);
      std::vector<std::string> labels;
      for (int j = 1; j <= categories; ++j) labels.push_back(std::to_string(j));
      const Theta out = transform_theta(spec, theta, parse_order(from_text, labels, categories),
                                        parse_order(to_text, labels, categories));
      if (out_path.empty()) {
        write_theta(std::cout, out, &spec);
      } else {
        std::ofstream os(out_path);
        if (!os) throw Error(ErrorKind::Parse, "cannot write '" + out_path + "'");
        write_theta(os, out, &spec);
      }
      return 0;
    }

    if (*simulate) {
      auto kv = read_key_values(plan_path);
      kv["seed"] = std::to_string(*seed);
      const auto plan = experiment_plan_from(kv);
      const Dataset data = simulate_dataset(plan.simulation, replicate);
      if (out_path.empty()) {
        write_csv(std::cout, data);
      } else {
        std::ofstream os(out_path);
        if (!os) throw Error(ErrorKind::Parse, "cannot write '" + out_path + "'");
        write_csv(os, data);
      }
      return 0;
    }

    if (*experiment) {
      auto kv = read_key_values(plan_path);
      if (seed) kv["seed"] = std::to_string(*seed);
      if (!kv.count("seed")) throw UsageError("experiment needs --seed or a 'seed' entry in the plan");
      const auto plan = experiment_plan_from(kv);
      const int count = experiment_reps_given ? reps : plan.replicates;
      const auto& labels = plan.simulation.labels;
      std::cout << "generating " << plan.simulation.spec.name() << " at " << plan.simulation.sigma0.to_labels(labels)
                << ", fitting " << plan.fit_spec.name() << ", N = " << plan.simulation.total << ", seed "
                << plan.seed << "\n\n"
                << std::setw(4) << "rep" << std::setw(8) << "N" << std::setw(12) << "AIC_0" << std::setw(6) << "rank"
                << std::setw(12) << "AIC_best" << std::setw(10) << "gap" << std::setw(14) << "|dl|/N"
                << "  best order\n";
      ordered_json rows = ordered_json::array();
      for (int b = 0; b < count; ++b) {
        const auto o = true_order_experiment(plan.simulation, plan.fit_spec, config, options,
                                             static_cast<std::uint64_t>(b));
        const double dl = std::abs(o.loglik_best - o.loglik_generating) / static_cast<double>(o.observations);
        std::cout << std::setw(4) << b << std::setw(8) << o.observations << std::fixed << std::setprecision(2)
                  << std::setw(12) << o.aic_true << std::setw(6) << o.rank << std::setw(12) << o.aic_best
                  << std::setw(10) << o.gap << std::scientific << std::setw(14) << dl << std::defaultfloat << "  "
                  << o.best_order.to_labels(labels) << '\n';
        rows.push_back({{"replicate", b},
                        {"observations", o.observations},
                        {"aic_true", o.aic_true},
                        {"rank", o.rank},
                        {"aic_best", o.aic_best},
                        {"gap", o.gap},
                        {"loglik_best", o.loglik_best},
                        {"loglik_generating", o.loglik_generating},
                        {"best_order", o.best_order.to_labels(labels)},
                        {"classes", o.classes}});
      }
      ordered_json j;
      j["generating"] = plan.simulation.spec.name();
      j["fitted"] = plan.fit_spec.name();
      j["rows"] = rows;
      ordered_json cfg = fit_config_json(config);
      cfg["plan"] = kv;
      j["provenance"] = {{"tool", kVersion}, {"seed", plan.seed}, {"config", cfg}};
      write_out(out_path, j.dump(2));
      return 0;
    }

    if (*cv) {
      const auto in = load(data_path);
      const Dataset& data = in.data;
      const ModelSpec spec = make_spec(model, data.categories(), data.covariates(), data.covariate_names());
      std::vector<Permutation> orders;
      for (const auto& t : cv_orders) orders.push_back(parse_order(t, data.category_labels(), data.categories()));
      CrossValPlan plan{train_fraction, reps, *seed};
      plan.validate();
      const Eigen::MatrixXd loss = cross_validate_orders(data, spec, orders, plan, config, options.threads);
      ordered_json jorders = ordered_json::array();
      for (std::size_t k = 0; k < orders.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        std::vector<double> v(loss.col(col).data(), loss.col(col).data() + loss.rows());
        std::cout << orders[k].to_labels(data.category_labels()) << "  mean loss " << mean_sd(v) << '\n';
        ordered_json jo;
        jo["order"] = orders[k].to_labels(data.category_labels());
        ordered_json lv = ordered_json::array();
        for (double x : v) lv.push_back(std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr));
        jo["loss"] = lv;
        if (k > 0) {
          const auto t = paired_t_test_one_sided(std::vector<double>(loss.col(0).data(), loss.col(0).data() + loss.rows()), v);
          std::cout << "    vs first order: t = " << t.t << ", one-sided p = " << t.p << '\n';
          jo["t"] = t.t;
          jo["p"] = t.p;
        }
        jorders.push_back(jo);
      }
      std::cout << "\nper-repetition losses:\n";
      for (Eigen::Index r = 0; r < loss.rows(); ++r) {
        std::cout << std::setw(4) << r;
        for (Eigen::Index k = 0; k < loss.cols(); ++k) std::cout << ' ' << std::setprecision(10) << std::setw(14) << loss(r, k);
        std::cout << '\n';
      }
      ordered_json j;
      j["model"] = spec.name();
      j["orders"] = jorders;
      ordered_json cfg = fit_config_json(config);
      cfg["train_fraction"] = train_fraction;
      cfg["repetitions"] = reps;
      j["provenance"] = {{"tool", kVersion}, {"seed", *seed}, {"config", cfg}};
      write_out(out_path, j.dump(2));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << ordered_json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
