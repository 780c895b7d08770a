#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qroofs/experiments.hpp"
#include "qroofs/io.hpp"
#include "qroofs/means.hpp"
#include "qroofs/metrology.hpp"
#include "qroofs/roofs.hpp"
#include "qroofs/sdp/bounds.hpp"

namespace qroofs::cli {

namespace detail {

inline DensityMatrix load_density(const std::string& path) {
  return DensityMatrix(io::load_matrix(path));
}

inline HermitianOperator load_observable(const std::string& path) {
  return HermitianOperator(io::load_matrix(path));
}

inline void emit(const io::json& j, std::ostream& out,
                 const std::string& output_path = {}) {
  const std::string text = j.dump();
  out << text << "\n";
  if (!output_path.empty()) io::write_file(output_path, text + "\n");
}

}  // namespace detail

// Exit codes: 0 success, 1 computation error (bad matrix file, infeasible
// program, failed verification), 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"variance, quantum Fisher information and decomposition bounds"};
  app.set_version_flag("--version", std::string(io::build_id()));
  app.require_subcommand(1);

  struct {
    std::string rho;
    std::string obs;
    std::string mean;
    std::string decomposition;
    std::string output;
    std::string format = "json";
    std::string bound = "sppt";
    int parties = 3;
    int local_dim = 2;
    int trials = 200;
    std::uint64_t seed = 0;
    double tolerance = tol::sdp_default;
    double verify_tolerance = tol::reassembly;
    bool raw = false;
    bool zero_diagonal = false;
  } opt;
  int exit_code = 0;

  const auto add_state_options = [&](CLI::App* cmd) {
    cmd->add_option("--rho", opt.rho, "density matrix JSON file")->required();
    cmd->add_option("--obs", opt.obs, "observable JSON file")->required();
  };
  const auto load_pair = [&] {
    return std::pair{detail::load_density(opt.rho),
                     detail::load_observable(opt.obs)};
  };

  CLI::App* compute =
      app.add_subcommand("compute", "scalar quantities of a state/observable pair");
  compute->require_subcommand(1);

  CLI::App* c_variance = compute->add_subcommand("variance", "variance of the observable");
  add_state_options(c_variance);
  c_variance->callback([&] {
    const auto [rho, obs] = load_pair();
    detail::emit(io::json{{"variance", variance(rho, obs)}}, out);
  });

  CLI::App* c_qfi = compute->add_subcommand("qfi", "quantum Fisher information");
  add_state_options(c_qfi);
  c_qfi->callback([&] {
    const auto [rho, obs] = load_pair();
    detail::emit(io::json{{"qfi", qfi(rho, obs)}}, out);
  });

  CLI::App* c_skew = compute->add_subcommand("skew", "Wigner-Yanase skew information");
  add_state_options(c_skew);
  c_skew->callback([&] {
    const auto [rho, obs] = load_pair();
    detail::emit(io::json{{"skew", skew_information(rho, obs)}}, out);
  });

  const auto add_mean_options = [&](CLI::App* cmd) {
    add_state_options(cmd);
    cmd->add_option("--mean", opt.mean, "mean name from the catalog")->required();
    cmd->add_flag("--raw", opt.raw, "skip the normalization prefactor");
  };

  CLI::App* c_gvar =
      compute->add_subcommand("gen-var", "generalized variance for a catalog mean");
  add_mean_options(c_gvar);
  c_gvar->callback([&] {
    const auto [rho, obs] = load_pair();
    const MeanFunction mean = mean_by_name(opt.mean);
    detail::emit(io::json{{"gen-var", generalized_variance(rho, obs, mean, !opt.raw)},
                          {"mean", std::string(mean.name)},
                          {"normalized", !opt.raw}},
                 out);
  });

  CLI::App* c_gqfi = compute->add_subcommand(
      "gen-qfi", "generalized quantum Fisher information for a catalog mean");
  add_mean_options(c_gqfi);
  c_gqfi->callback([&] {
    const auto [rho, obs] = load_pair();
    const MeanFunction mean = mean_by_name(opt.mean);
    detail::emit(io::json{{"gen-qfi", generalized_qfi(rho, obs, mean, !opt.raw)},
                          {"mean", std::string(mean.name)},
                          {"normalized", !opt.raw}},
                 out);
  });

  CLI::App* roof =
      app.add_subcommand("roof", "pure-state decompositions with extremal mixture variance");
  roof->require_subcommand(1);

  CLI::App* r_concave = roof->add_subcommand(
      "concave", "decomposition whose mixture variance equals the variance");
  add_state_options(r_concave);
  r_concave->add_option("--output", opt.output, "also write the decomposition to this file");
  r_concave->callback([&] {
    const auto [rho, obs] = load_pair();
    detail::emit(io::decomposition_to_json(concave_roof_decomposition(rho, obs)),
                 out, opt.output);
  });

  CLI::App* r_theorem2 = roof->add_subcommand(
      "theorem2",
      "two-state decomposition reaching a quarter of the quantum Fisher information "
      "(rank-2 state, zero-diagonal observable)");
  add_state_options(r_theorem2);
  r_theorem2->add_option("--output", opt.output, "also write the decomposition to this file");
  r_theorem2->callback([&] {
    const auto [rho, obs] = load_pair();
    detail::emit(io::decomposition_to_json(convex_roof_decomposition(rho, obs)),
                 out, opt.output);
  });

  CLI::App* r_verify = roof->add_subcommand(
      "verify", "check that a decomposition reassembles the state and report its mixture variance");
  add_state_options(r_verify);
  r_verify->add_option("--decomposition", opt.decomposition, "decomposition JSON file")
      ->required();
  r_verify->add_option("--tolerance", opt.verify_tolerance,
                       "largest acceptable reassembly residual");
  r_verify->callback([&] {
    const auto [rho, obs] = load_pair();
    const PureDecomposition decomposition =
        io::decomposition_from_json(io::parse_file(opt.decomposition));
    if (decomposition.dim() != rho.dim()) {
      std::ostringstream msg;
      msg << "decomposition dimension " << decomposition.dim()
          << " does not match state dimension " << rho.dim();
      throw std::invalid_argument(msg.str());
    }
    const double residual = decomposition.reassembly_residual(rho.matrix());
    const bool valid = residual <= opt.verify_tolerance;
    detail::emit(io::json{{"residual", residual},
                          {"mixture_variance", mixture_variance(decomposition, obs)},
                          {"variance", variance(rho, obs)},
                          {"valid", valid}},
                 out);
    if (!valid) {
      err << "error: decomposition does not reassemble the state, residual "
          << residual << " exceeds " << opt.verify_tolerance << "\n";
      exit_code = 1;
    }
  });

  CLI::App* bound =
      app.add_subcommand("bound", "semidefinite lower bounds on four times the convex roof");
  bound->require_subcommand(1);

  const auto emit_bound = [&](const sdp::BoundResult& result) {
    if (result.witness.status == sdp::SolveStatus::infeasible) {
      err << "error: the extension program is infeasible for this input\n";
      exit_code = 1;
      return;
    }
    detail::emit(io::json{{"value", result.value},
                          {"extension_size", result.extension_size},
                          {"status", sdp::to_string(result.witness.status)},
                          {"gap", result.witness.gap},
                          {"iterations", result.witness.iterations}},
                 out);
  };

  CLI::App* b_sppt = bound->add_subcommand(
      "sppt", "symmetric two-copy extension with positive partial transpose");
  add_state_options(b_sppt);
  b_sppt->add_option("--tolerance", opt.tolerance, "solver tolerance");
  b_sppt->callback([&] {
    const auto [rho, obs] = load_pair();
    emit_bound(sdp::bound_sppt(rho, obs, opt.tolerance));
  });

  CLI::App* b_se =
      bound->add_subcommand("se", "multi-party symmetric extension hierarchy");
  add_state_options(b_se);
  b_se->add_option("--n", opt.parties, "number of parties in the extension (at least 3)");
  b_se->add_option("--tolerance", opt.tolerance, "solver tolerance");
  b_se->callback([&] {
    const auto [rho, obs] = load_pair();
    emit_bound(sdp::bound_se(rho, obs, opt.parties, opt.tolerance));
  });

  CLI::App* experiment =
      app.add_subcommand("experiment", "randomized ensembles over states and observables");
  experiment->require_subcommand(1);

  CLI::App* e_table = experiment->add_subcommand(
      "table", "compare extension bounds against the quantum Fisher information");
  e_table->add_option("--d", opt.local_dim, "local dimension (2, 3 or 4)");
  e_table->add_option("--bound", opt.bound, "bound to run")
      ->check(CLI::IsMember({"sppt", "se3", "se4"}));
  e_table->add_flag("--zero-diagonal", opt.zero_diagonal,
                    "use observables with zero diagonal in the state eigenbasis");
  e_table->add_option("--trials", opt.trials, "number of random trials");
  e_table->add_option("--seed", opt.seed, "stream seed");
  e_table->add_option("--tolerance", opt.tolerance, "solver tolerance");
  e_table->add_option("--output", opt.output, "write the per-trial log to this file");
  e_table->add_option("--format", opt.format, "per-trial log format")
      ->check(CLI::IsMember({"json", "csv"}));
  e_table->callback([&] {
    TrialConfig config;
    config.local_dim = opt.local_dim;
    if (opt.bound == "sppt") {
      config.kind = BoundKind::sppt;
      config.extension = 2;
    } else {
      config.kind = BoundKind::se;
      config.extension = opt.bound == "se3" ? 3 : 4;
    }
    config.zero_diagonal = opt.zero_diagonal;
    config.trials = opt.trials;
    config.seed = opt.seed;
    config.tolerance = opt.tolerance;
    const TableResult result = run_table(config);
    if (!opt.output.empty()) {
      if (opt.format == "csv") {
        io::write_file(opt.output, io::records_to_csv(result.records));
      } else {
        std::ostringstream lines;
        for (const auto& record : result.records) {
          lines << io::trial_record_to_json(record).dump() << "\n";
        }
        io::write_file(opt.output, lines.str());
      }
    }
    if (opt.format == "csv") {
      out << io::summary_to_csv(result);
    } else {
      detail::emit(io::table_to_json(result), out);
    }
  });

  CLI::App* e_conjecture = experiment->add_subcommand(
      "conjecture",
      "probe random decompositions against a quarter of the quantum Fisher information");
  e_conjecture->add_option("--d", opt.local_dim, "local dimension (2, 3 or 4)");
  e_conjecture->add_option("--trials", opt.trials, "number of random trials");
  e_conjecture->add_option("--seed", opt.seed, "stream seed");
  e_conjecture->callback([&] {
    PhiloxEngine gen(opt.seed);
    detail::emit(io::conjecture_to_json(
                     conjecture_monitor(opt.trials, opt.local_dim, gen)),
                 out);
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace qroofs::cli
