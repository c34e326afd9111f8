#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ard/stability.hpp"

namespace ard {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Scratch space for the determinism criterion; created if missing.
  std::filesystem::path work_dir = "acceptance_work";
  /// Called as each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

/// Runs criteria 1..12 in order. Tolerances and runtime budgets are fixed
/// in the implementation.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  7  classification oracle  (0.41 s)  <detail>"
std::string format_result(const CriterionResult& result);

/// Label from the eigenvalues of the linearised 2x2 matrix (consistent
/// determinant form), independent of the trace/determinant closed forms.
Region first_principles_label(const KineticParams& p, double eta_sq);

/// Writes the reference artifact set (spectrum table, region map, curves,
/// mesh, phase plot, short simulation) into `dir`; returns paths relative
/// to `dir`.
std::vector<std::string> write_reference_artifacts(const std::filesystem::path& dir);

}  // namespace ard
