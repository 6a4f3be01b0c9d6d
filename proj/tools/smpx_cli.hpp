#pragma once

// Command-line front end. Kept in a header so the test suite can drive run()
// with in-memory streams.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smpx/smpx.hpp"

namespace smpx::cli {

inline constexpr const char* kVersion = "smpx 0.1.0";

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kComputationError = 2,
  kInputError = 3,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::DuplicateTransition:
    case ErrorKind::UnknownState:
    case ErrorKind::IoError:
      return kInputError;
    default:
      return kComputationError;
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void report_error(std::ostream& err, std::string_view kind, const std::string& message,
                         const Json& details = nullptr) {
  Json doc{{"error", kind}, {"message", message}};
  if (!details.is_null()) doc["details"] = details;
  err << doc.dump() << "\n";
}

/// Validates before any computation; on failure prints the report and returns false.
inline bool require_valid(const PerturbedSMP& m, std::ostream& err) {
  auto report = validate(m);
  if (report.passed()) return true;
  report_error(err, "ValidationFailure", "model violates the perturbation conditions", to_json(report));
  return false;
}

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotic expansions for perturbed semi-Markov processes", "smpx"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string input;
  std::string output;
  auto add_io = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", input, what)->required();
    sub->add_option("-o,--output", output, "Write the result here instead of stdout");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check the perturbation conditions of a model");
  add_io(validate_cmd, "Model file (JSON)");

  std::string exclude;
  auto* reduce_cmd = app.add_subcommand("reduce", "Exclude one state and emit the reduced model");
  add_io(reduce_cmd, "Model file (JSON)");
  reduce_cmd->add_option("--exclude", exclude, "State to exclude")->required();

  std::string only_state;
  bool verify = false;
  auto* return_cmd = app.add_subcommand("return-times", "Expansions of expected return times");
  add_io(return_cmd, "Model file (JSON)");
  return_cmd->add_option("--state", only_state, "Only this state");
  return_cmd->add_flag("--verify-permutation", verify, "Re-run with the reversed exclusion order");

  std::optional<int> min_order;
  auto* stationary_cmd = app.add_subcommand("stationary", "Expansion table for stationary probabilities");
  add_io(stationary_cmd, "Model file (JSON)");
  stationary_cmd->add_option("--min-order", min_order, "Fail unless every stationary expansion reaches this order");
  stationary_cmd->add_flag("--verify-permutation", verify, "Re-run with the reversed exclusion order");

  std::string epsilon;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate an expansion table at a rational eps");
  add_io(eval_cmd, "Table file (JSON, as written by 'stationary')");
  eval_cmd->add_option("--epsilon", epsilon, "Rational eps, e.g. 1/10")->required();

  std::vector<std::string> grid_text;
  std::string format = "json";
  auto* oracle_cmd = app.add_subcommand("oracle", "Compare stationary expansions with exact solves");
  add_io(oracle_cmd, "Model file (JSON)");
  oracle_cmd->add_option("--grid", grid_text, "Strictly decreasing eps values")->delimiter(',');
  oracle_cmd->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return kInputError;
  }

  auto emit = [&](const std::string& text) {
    if (output.empty()) {
      out << text;
      return;
    }
    std::ofstream file(output, std::ios::binary);
    if (!file) throw Error(ErrorKind::IoError, "cannot write '" + output + "'");
    file << text;
  };

  try {
    if (*eval_cmd) {
      const Rational eps = parse_rational(epsilon);
      Json doc;
      try {
        doc = Json::parse(read_file(input));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("table: ") + e.what());
      }
      const auto table = table_from_json(doc);
      Json states = Json::object();
      for (const auto& r : table.rows) {
        states[r.state] = Json{{"return_time", to_string(evaluate(r.return_time, eps))},
                               {"row_sum", to_string(evaluate(r.row_sum, eps))},
                               {"stationary", to_string(evaluate(r.stationary, eps))}};
      }
      emit(Json{{"epsilon", to_string(eps)}, {"states", std::move(states)}}.dump(2) + "\n");
      return kOk;
    }

    const PerturbedSMP model = parse_model(read_file(input));

    if (*validate_cmd) {
      const auto report = validate(model);
      emit(to_json(report).dump(2) + "\n");
      return report.passed() ? kOk : kValidationFailure;
    }
    if (!require_valid(model, err)) return kValidationFailure;

    if (*reduce_cmd) {
      auto step = reduce_state(model, model.index_of(exclude));
      emit(serialize_model(step.after));
      return kOk;
    }

    if (*return_cmd) {
      std::vector<PerturbedSMP::Index> targets;
      if (only_state.empty()) {
        for (PerturbedSMP::Index i = 0; i < model.size(); ++i) targets.push_back(i);
      } else {
        targets.push_back(model.index_of(only_state));
      }
      std::vector<std::optional<Expansion>> results(targets.size());
      parallel_for(targets.size(), [&](std::size_t t) {
        results[t] = verify ? verified_return_time_expansion(model, targets[t])
                            : return_time_expansion(model, targets[t]);
      });
      Json states = Json::object();
      for (std::size_t t = 0; t < targets.size(); ++t) {
        states[model.state(targets[t])] =
            Json{{"return_time", to_json(*results[t])}, {"order", default_order(model, targets[t])}};
      }
      emit(Json{{"states", std::move(states)},
                {"permutation_verification", verify ? "passed" : "not run"}}
               .dump(2) +
           "\n");
      return kOk;
    }

    if (*stationary_cmd) {
      const auto table = full_table(model, verify);
      if (min_order) {
        for (const auto& r : table.rows) {
          if (r.stationary.high() < *min_order) {
            throw Error(ErrorKind::InsufficientOrder,
                        "stationary expansion of " + r.state + " reaches window (" +
                            std::to_string(r.stationary.low()) + ", " + std::to_string(r.stationary.high()) +
                            "), below the requested order " + std::to_string(*min_order));
          }
        }
      }
      emit(to_json(table).dump(2) + "\n");
      return kOk;
    }

    if (*oracle_cmd) {
      std::vector<Rational> grid;
      if (grid_text.empty()) {
        grid = default_grid(model);
      } else {
        for (const auto& g : grid_text) grid.push_back(parse_rational(g));
      }
      const auto table = full_table(model);
      const auto report = convergence_report(model, table, grid);
      if (!report.warning.empty()) err << "warning: " << report.warning << "\n";
      emit(format == "text" ? to_text(report) : to_json(report).dump(2) + "\n");
      return report.passed() ? kOk : kValidationFailure;
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return kComputationError;
  }
  return kOk;
}

}  // namespace smpx::cli
