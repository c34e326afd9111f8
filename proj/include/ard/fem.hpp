#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ard/geometry.hpp"
#include "ard/io.hpp"
#include "ard/stability.hpp"

namespace ard {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 operators with natural (zero-flux) boundary conditions.
struct FemOperators {
  SparseMatrix mass;       // consistent
  SparseMatrix stiffness;  // symmetric, constants in the kernel
  Eigen::VectorXd lumped;  // row sums of the consistent mass
  double area = 0.0;
};

/// Throws ErrorCode::Domain on a triangle with area below 1e-14 or an
/// out-of-range vertex index.
FemOperators assemble(const TriMesh& mesh);

struct FemState {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double t = 0.0;
  long step = 0;
};

/// Steady state plus 0.0016 cos(2 pi (x+y)) + 0.01 sum_{i=1..8} cos(i pi x),
/// the same perturbation on both species, interpolated at the vertices.
FemState initial_conditions(const KineticParams& p, const TriMesh& mesh);
FemState uniform_steady_state(const KineticParams& p, std::size_t vertex_count);

/// How the kinetics enter a step. Diffusion is implicit in both.
enum class ReactionScheme {
  /// Linear decay terms implicit: -u at the new time in the u equation,
  /// -u_new^2 v_new in the v equation; u^2 v in the u equation explicit.
  LinearlyImplicit,
  /// All kinetics at the old time level.
  Explicit,
};
std::string_view to_string(ReactionScheme scheme) noexcept;
ReactionScheme parse_reaction_scheme(std::string_view text);

struct RunConfig {
  KineticParams params;
  double dt = 1e-3;
  double t_end = 10.0;
  double threshold = 5e-4;      // stop once both time-derivative rates fall below
  int min_steps = 10;           // threshold is not tested earlier
  bool lumped_mass = false;     // lump the time-derivative mass as well
  ReactionScheme scheme = ReactionScheme::LinearlyImplicit;
  double solver_tol = 1e-10;    // CG relative residual
  int max_iterations = 10000;
  double snapshot_interval = 0.0;  // 0 keeps only the initial and final states
};

/// Throws ErrorCode::Domain unless dt, t_end and threshold are positive.
/// gamma = 0 (pure diffusion) is accepted.
void validate(const RunConfig& config);

/// One time step. Matrices depending only on the configuration are built once.
class ImexStepper {
 public:
  ImexStepper(const FemOperators& ops, const RunConfig& config);

  /// Throws ErrorCode::SolverStagnation when CG does not reach the tolerance
  /// and ErrorCode::NonFinite when the new state has a NaN or Inf.
  FemState step(const FemState& state) const;

  const SparseMatrix& time_mass() const noexcept { return time_mass_; }

 private:
  const FemOperators& ops_;
  RunConfig config_;
  SparseMatrix time_mass_;
  SparseMatrix u_matrix_;  // time mass + dt K (+ dt gamma M_L when implicit)
  SparseMatrix v_base_;    // time mass + dt d K
};

/// sqrt(delta' M delta) / dt per species.
std::pair<double, double> l2_time_derivative(const FemState& prev, const FemState& next, double dt,
                                             const FemOperators& ops);

struct MonitorSample {
  double t = 0.0;
  double rate_u = 0.0;
  double rate_v = 0.0;
};

enum class Termination { Threshold, EndTime };
std::string_view to_string(Termination t) noexcept;

struct RunRecord {
  RunConfig config;
  std::vector<FemState> snapshots;  // initial, scheduled, final
  std::vector<MonitorSample> monitor;
  Termination termination = Termination::EndTime;
  FemState final_state;
};

/// Integrates from `initial` until t_end or both rates < threshold.
RunRecord simulate(const FemOperators& ops, const FemState& initial, const RunConfig& config);

/// Max minus min of the nodal values.
double nodal_range(const Eigen::VectorXd& values);

/// Instability episodes in m = max(rate_u, rate_v). The initial transient
/// ends at the largest m after the first `layer_steps` samples (which hold
/// the diffusive smoothing of the initial data). After it, an episode is a
/// local maximum of m at least `rise_ratio` times the previous local maximum,
/// i.e. a renewed growth of the time derivative.
struct EpisodeReport {
  std::size_t transient_peak = 0;  // index into the monitor series
  std::vector<std::size_t> episodes;
  double max_rise = 0.0;  // largest ratio of consecutive post-transient maxima
  bool monotone_after_transient() const noexcept { return episodes.empty(); }
};
EpisodeReport analyse_episodes(const std::vector<MonitorSample>& monitor, std::size_t layer_steps = 10,
                               double rise_ratio = 1.1);

/// `x y u v` per vertex, preceded by a `# t=... step=...` line.
std::string snapshot_text(const TriMesh& mesh, const FemState& state);
/// "t,rate_u,rate_v" rows.
std::string monitor_csv(const std::vector<MonitorSample>& monitor);
nlohmann::json run_config_json(const RunConfig& config);
/// Configuration, mesh statistics and termination reason.
nlohmann::json run_summary(const RunRecord& run, const TriMesh& mesh);

/// Writes snapshot_<n>.txt files and monitor.csv; returns the file names.
std::vector<std::string> export_run(const RunRecord& run, const TriMesh& mesh,
                                    const std::filesystem::path& dir);

}  // namespace ard
