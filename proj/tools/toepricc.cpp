// Command line front end: decide invertibility of the block Toeplitz
// operator attached to a rational matrix symbol, factor the symbol, and
// export finite sections and explicit inverse blocks.
//
// Exit codes: 0 invertible, 1 input error, 2 symbol vanishes on the unit
// circle, 3 not invertible, 4 undecided.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "toepricc/toepricc.hpp"

namespace {

using namespace toepricc;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitZeroOnCircle = 2;
constexpr int kExitNotInvertible = 3;
constexpr int kExitUndecided = 4;

struct CommonArgs {
  std::string input;
  std::string format = "json";
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  // Existence is checked by the loader so that a missing file lands on the
  // input-error exit code rather than a CLI11 validation code.
  cmd->add_option("input", args.input, "realization JSON file")->required();
  cmd->add_option("--format", args.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  cmd->add_option("--out", args.out_dir, "directory for result files");
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

Split parse_split(const std::string& name) {
  return name == "identity_D" ? Split::identity_D : Split::identity_delta;
}

void emit_matrix(const std::filesystem::path& dir, const std::string& stem,
                 const CMatrix& m, const std::string& format) {
  if (format == "json") {
    write_file((dir / (stem + ".json")).string(), matrix_to_json(m).dump(2) + "\n");
  } else {
    write_file((dir / (stem + ".csv")).string(), matrix_to_csv(m));
  }
}

int run_analyze(const CommonArgs& common, const AnalyzeOptions& options) {
  const Realization r = load_realization(common.input);
  AnalysisReport rep;
  try {
    rep = analyze(r, options);
  } catch (const ZeroOnCircle& e) {
    std::cerr << "zero on circle: " << e.what() << "\n";
    return kExitZeroOnCircle;
  }
  const json doc = report_to_json(rep);
  if (common.format == "text")
    std::cout << report_to_text(rep);
  else
    std::cout << doc.dump(2) << "\n";
  if (!common.out_dir.empty()) {
    const auto dir = ensure_out_dir(common.out_dir);
    write_file((dir / "report.json").string(), doc.dump(2) + "\n");
    write_file((dir / "report.txt").string(), report_to_text(rep));
    if (rep.riccati.status == RiccatiStatus::converged)
      emit_matrix(dir, "Q", rep.riccati.Q,
                  common.format == "json" ? "json" : "csv");
  }
  return verdict_exit_code(rep.verdict);
}

int run_sections(const CommonArgs& common, std::size_t n, double radius,
                 std::size_t grid, double tol_circle) {
  const Realization r = load_realization(common.input);
  validate_stability(r, tol_circle);
  if (radius <= 0.0) {
    const SymbolDiagnostics d = diagnose(r, grid, 1e-8, tol_circle);
    radius = pipeline_radius(d);
  }
  const ToeplitzSection plain = build_section(r, n);
  const ToeplitzSection scaled =
      (radius == 1.0) ? plain : build_section(scale(r, radius), n);
  const double residual = scaling_similarity_check(r, n, radius);
  if (!common.out_dir.empty()) {
    const auto dir = ensure_out_dir(common.out_dir);
    emit_matrix(dir, "section", plain.data, common.format);
    emit_matrix(dir, "section_scaled", scaled.data, common.format);
    json summary;
    summary["N"] = n;
    summary["r"] = radius;
    summary["similarity_residual"] = residual;
    write_file((dir / "sections_summary.json").string(),
               summary.dump(2) + "\n");
  }
  std::printf("N=%zu r=%.17g similarity_residual=%.17g\n", n, radius,
              residual);
  return kExitOk;
}

int run_invert(const CommonArgs& common, std::size_t n,
               const std::string& split_name, const AnalyzeOptions& options) {
  const Realization r = load_realization(common.input);
  try {
    validate_stability(r, options.tol_circle);
  } catch (const InvalidRealization& e) {
    throw InputError(e.what());
  }
  const SymbolDiagnostics d =
      diagnose(r, options.grid, options.tol_zero, options.tol_circle);
  if (d.zero_scan_min < options.tol_zero) {
    std::cerr << "zero on circle: smallest singular value "
              << d.zero_scan_min << " on the scan grid\n";
    return kExitZeroOnCircle;
  }
  const RiccatiSolution sol =
      solve_fixed_point(r, options.tol, options.max_iter);
  if (!sol.stabilizing) {
    std::cerr << "no stabilizing Riccati solution: the operator has no "
                 "canonical factorization of this form\n";
    return kExitNotInvertible;
  }
  const FactorPair f = build_factors(r, sol, parse_split(split_name));
  const InverseBlocks ib = inverse_blocks(f, n);
  const auto dir = ensure_out_dir(common.out_dir.empty() ? std::string(".")
                                                         : common.out_dir);
  emit_matrix(dir, "inverse_blocks", ib.data, common.format);
  // The coefficient sequences go out stacked: block j occupies rows
  // j*m .. (j+1)*m - 1.
  CMatrix theta_stack(n * r.m, r.m), psi_stack(n * r.m, r.m);
  for (std::size_t j = 0; j < n; ++j) {
    theta_stack.set_block(j * r.m, 0, ib.theta_x[j]);
    psi_stack.set_block(j * r.m, 0, ib.psi_x[j]);
  }
  emit_matrix(dir, "theta_x", theta_stack, common.format);
  emit_matrix(dir, "psi_x", psi_stack, common.format);
  write_file((dir / "factors.json").string(),
             factor_pair_to_json(f).dump(2) + "\n");
  std::printf("N=%zu split=%s data=%zux%zu written to %s\n", n,
              split_name.c_str(), ib.data.rows(), ib.data.cols(),
              dir.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz operator inversion via Riccati factorization"};
  app.require_subcommand(1);

  CommonArgs analyze_args, sections_args, invert_args;
  AnalyzeOptions options;
  std::size_t sections_n = 64, invert_n = 64;
  double sections_r = 0.0;  // 0 = derive from the pole diagnostics
  std::string invert_split = "identity_delta";
  std::string analyze_split = "identity_delta";

  CLI::App* c_analyze =
      app.add_subcommand("analyze", "run the full decision pipeline");
  add_common(c_analyze, analyze_args);
  c_analyze->add_option("--tol", options.tol, "Riccati stop tolerance")
      ->capture_default_str();
  c_analyze->add_option("--max-iter", options.max_iter,
                        "Riccati iteration budget")
      ->capture_default_str();
  c_analyze->add_option("--N", options.n_max, "largest section order")
      ->capture_default_str();
  c_analyze->add_option("--grid", options.grid, "zero-scan grid size")
      ->capture_default_str();
  c_analyze->add_option("--tol-zero", options.tol_zero,
                        "circle-zero abort threshold")
      ->capture_default_str();
  c_analyze->add_option("--tol-circle", options.tol_circle,
                        "on-circle pole classification slack")
      ->capture_default_str();
  c_analyze->add_option("--split", analyze_split, "pivot split")
      ->check(CLI::IsMember({"identity_delta", "identity_D"}))
      ->capture_default_str();

  CLI::App* c_sections = app.add_subcommand(
      "sections", "export finite sections and the scaling similarity check");
  add_common(c_sections, sections_args);
  c_sections->add_option("--N", sections_n, "section order")
      ->capture_default_str();
  c_sections->add_option("--r", sections_r,
                         "scaling radius (default: derived from poles)");

  CLI::App* c_invert = app.add_subcommand(
      "invert", "export inverse blocks and the factor realizations");
  add_common(c_invert, invert_args);
  c_invert->add_option("--N", invert_n, "inverse corner order")
      ->capture_default_str();
  c_invert->add_option("--split", invert_split, "pivot split")
      ->check(CLI::IsMember({"identity_delta", "identity_D"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Fold CLI11's exit codes into the documented contract: help stays 0,
    // every malformed invocation is an input error.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_analyze->parsed()) {
      options.split = parse_split(analyze_split);
      return run_analyze(analyze_args, options);
    }
    if (c_sections->parsed())
      return run_sections(sections_args, sections_n, sections_r, options.grid,
                          options.tol_circle);
    options.split = parse_split(invert_split);
    return run_invert(invert_args, invert_n, invert_split, options);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidRealization& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidScaling& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUndecided;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUndecided;
  }
}
