// Command-line front end: list scenarios, run experiment cells to CSV,
// check preference matrices, and run a quick invariant self-test.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "duelbandit/duelbandit.hpp"

namespace db = duelbandit;
using nlohmann::json;

namespace {

json scenario_json(const db::Scenario& s) {
  json j;
  j["name"] = s.name;
  std::visit(
      [&](const auto& env) {
        using Env = std::decay_t<decltype(env)>;
        if constexpr (std::is_same_v<Env, db::UtilityEnvironment>) {
          j["kind"] = "utility";
          j["mu"] = env.mu();
          j["link"] = std::string(db::to_string(env.link().kind()));
        } else {
          j["kind"] = "preference_matrix";
          json rows = json::array();
          const auto& m = env.matrix();
          for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(row);
          }
          j["epsilon"] = rows;
          j["order"] = env.implied_order();
        }
      },
      s.environment);
  return j;
}

int cmd_list(bool as_json) {
  const auto scenarios = db::builtin_scenarios();
  if (as_json) {
    json doc = json::array();
    for (const auto& s : scenarios) doc.push_back(scenario_json(s));
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  for (const auto& s : scenarios) {
    std::cout << s.name;
    if (const auto* u = std::get_if<db::UtilityEnvironment>(&s.environment)) {
      std::cout << "  mu=(";
      for (std::size_t i = 0; i < u->mu().size(); ++i) std::cout << (i ? ", " : "") << u->mu()[i];
      std::cout << ")";
    } else {
      std::cout << "  preference matrix, 6 arms";
    }
    std::cout << '\n';
  }
  return 0;
}

struct RunOptions {
  std::string scenario;
  std::vector<std::string> algs{"doubler", "multisbm", "sparring"};
  std::size_t runs = 400;
  std::size_t horizon = 32768;
  std::uint64_t seed = 0;
  std::string out;
  std::string audit;
  std::vector<std::size_t> checkpoints;
  bool no_permute = false;
  bool bernoulli = false;
  unsigned threads = 0;
  double alpha = 0.0;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

int cmd_run(const RunOptions& o) {
  const auto noise = o.bernoulli ? db::UtilityNoise::Bernoulli : db::UtilityNoise::Deterministic;
  auto scenario = db::find_scenario(o.scenario, noise);
  if (!scenario) throw std::runtime_error("unknown scenario '" + o.scenario + "'");

  db::ScenarioSpec spec{scenario->name, scenario->environment};
  spec.algorithms.clear();
  for (const auto& a : o.algs) spec.algorithms.push_back(db::parse_algorithm(a));
  spec.runs = o.runs;
  spec.horizon = o.horizon;
  spec.base_seed = db::RandomSeed{o.seed};
  spec.checkpoints = o.checkpoints;
  spec.permute_arms = !o.no_permute;
  if (o.alpha > 0.0) spec.ucb_alpha = o.alpha;
  spec.validate();

  const auto summaries = db::run_scenario(spec, o.threads);
  std::ostringstream csv;
  db::emit_csv(summaries, csv);

  std::filesystem::path target = o.out;
  if (target.empty()) {
    if (const char* dir = std::getenv("DUELBANDIT_OUTPUT_DIR"); dir && *dir) {
      target = std::filesystem::path(dir) / (spec.name + ".csv");
    }
  }
  if (target.empty()) {
    std::cout << csv.str();
  } else {
    write_file(target, csv.str());
  }
  if (!o.audit.empty()) {
    std::ostringstream audit;
    db::emit_audit_csv(summaries, audit);
    write_file(o.audit, audit.str());
  }
  return 0;
}

Eigen::MatrixXd matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::runtime_error("matrix file is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::runtime_error("matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

// Accepts either a JSON document (a nested array, or an object with
// "epsilon" and optional "order") or whitespace-separated rows of numbers.
db::PreferenceMatrixEnvironment load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << f.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    const json doc = json::parse(text);
    const json& eps = doc.is_object() ? doc.at("epsilon") : doc;
    auto m = matrix_from_rows(eps.get<std::vector<std::vector<double>>>());
    std::optional<std::vector<db::ArmIndex>> order;
    if (doc.is_object() && doc.contains("order")) order = doc["order"].get<std::vector<db::ArmIndex>>();
    return db::PreferenceMatrixEnvironment(std::move(m), std::move(order));
  }
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::runtime_error("bad number '" + cell + "'");
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return db::PreferenceMatrixEnvironment(matrix_from_rows(rows));
}

int cmd_verify(const std::string& path) {
  std::cout << db::format_report(db::verify_relaxed_properties(load_matrix(path)));
  return 0;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest() {
  std::vector<std::pair<std::string, std::function<bool()>>> checks;

  checks.emplace_back("link complementarity and favoring", [] {
    db::Rng rng(db::RandomSeed{1});
    for (int i = 0; i < 10'000; ++i) {
      const double u = rng.uniform01(), v = rng.uniform01();
      for (auto k : db::kLinkKinds) {
        const db::LinkFunction link(k);
        const double p = link(u, v);
        if (std::abs(p + link(v, u) - 1.0) > 1e-12) return false;
        if ((u > v && !(p > 0.5)) || (u < v && !(p < 0.5))) return false;
      }
    }
    return true;
  });

  checks.emplace_back("random stream determinism", [] {
    db::Rng a(db::RandomSeed{9}), b(db::RandomSeed{9});
    for (int i = 0; i < 100'000; ++i) {
      if (a() != b()) return false;
    }
    return true;
  });

  checks.emplace_back("UCB advance/feedback alternation", [] {
    db::UcbSbm sbm(3);
    sbm.advance();
    try {
      sbm.advance();
      return false;
    } catch (const db::ContractViolation&) {
    }
    sbm.feedback(1.0);
    try {
      sbm.feedback(1.0);
      return false;
    } catch (const db::ContractViolation&) {
    }
    return true;
  });

  checks.emplace_back("Doubler epoch boundaries at 2, 6, 14, 30", [] {
    db::Doubler<db::UcbSbm> doubler(db::UcbSbm(6));
    db::Rng rng(db::RandomSeed{2});
    std::vector<std::size_t> boundaries;
    for (std::size_t t = 1; t <= 30; ++t) {
      const auto before = doubler.epoch();
      doubler.propose(rng);
      doubler.absorb(db::Choice::Left);
      if (doubler.epoch() != before) boundaries.push_back(t);
    }
    return boundaries == std::vector<std::size_t>{2, 6, 14, 30};
  });

  checks.emplace_back("preference table antisymmetric, row A as published", [] {
    const auto m = db::yj_epsilon_matrix();
    const double row_a[] = {0.0, 0.05, 0.05, 0.04, 0.11, 0.11};
    for (int j = 0; j < 6; ++j) {
      if (m(0, j) != row_a[j]) return false;
    }
    return (m + m.transpose()).isZero(1e-15);
  });

  checks.emplace_back("choice regret <= average regret on a 21x21 grid", [] {
    for (auto k : db::kLinkKinds) {
      for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
          const double u = i / 20.0, v = j / 20.0, best = std::max(u, v);
          if (db::expected_choice_regret(db::LinkFunction(k), best, u, v) >
              db::expected_av_regret(best, u, v) + 1e-15) {
            return false;
          }
        }
      }
    }
    return true;
  });

  checks.emplace_back("cell reproducible under a fixed seed", [] {
    auto s = db::find_scenario("2good-logit");
    db::ScenarioSpec spec{s->name, s->environment};
    spec.runs = 4;
    spec.horizon = 256;
    spec.base_seed = db::RandomSeed{3};
    std::ostringstream a, b;
    db::emit_csv(db::run_scenario(spec), a);
    db::emit_csv(db::run_scenario(spec), b);
    return a.str() == b.str();
  });

  int failures = 0;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      std::cout << "  (" << e.what() << ")\n";
    }
    std::cout << (ok ? "PASS  " : "FAIL  ") << name << '\n';
    failures += !ok;
  }
  std::cout << (checks.size() - static_cast<std::size_t>(failures)) << "/" << checks.size()
            << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dueling bandit reductions: experiment runner and checks"};
  app.require_subcommand(1);

  bool list_json = false;
  auto* list = app.add_subcommand("list", "Print the built-in scenario registry");
  list->add_flag("--json", list_json, "Export names, utility vectors or matrices, and links as JSON");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one scenario and write a regret-curve CSV");
  run->add_option("--scenario", run_opts.scenario, "Scenario name (see `list`)")->required();
  run->add_option("--algs", run_opts.algs, "Comma-separated subset of doubler,multisbm,sparring")
      ->delimiter(',');
  run->add_option("--runs", run_opts.runs, "Replications per algorithm")->check(CLI::PositiveNumber);
  run->add_option("--horizon", run_opts.horizon, "Duels per run")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_opts.seed, "Base seed; run r uses seed + r");
  run->add_option("--out", run_opts.out,
                  "Output CSV (default: $DUELBANDIT_OUTPUT_DIR/<scenario>.csv, else stdout)");
  run->add_option("--audit", run_opts.audit, "Also write per-run arm permutations to this CSV");
  run->add_option("--checkpoints", run_opts.checkpoints, "Comma-separated checkpoint times")
      ->delimiter(',');
  run->add_flag("--no-permute", run_opts.no_permute, "Keep the built-in arm labelling in every run");
  run->add_flag("--bernoulli", run_opts.bernoulli, "Draw Bernoulli utilities instead of their means");
  run->add_option("--alpha", run_opts.alpha, "UCB alpha for every inner machine")
      ->check(CLI::PositiveNumber);
  run->add_option("--threads", run_opts.threads, "Worker threads (0 = all cores)");

  std::string matrix_path;
  auto* verify = app.add_subcommand("verify-matrix", "Check relaxed transitivity and triangle conditions");
  verify->add_option("--file", matrix_path, "Matrix as JSON or whitespace-separated rows")->required();

  auto* selftest = app.add_subcommand("selftest", "Run quick invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*list) return cmd_list(list_json);
    if (*run) return cmd_run(run_opts);
    if (*verify) return cmd_verify(matrix_path);
    if (*selftest) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
