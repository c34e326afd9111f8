#include "ard/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ard/error.hpp"
#include "ard/parallel.hpp"

namespace ard {

namespace {

using Triplet = Eigen::Triplet<double>;

struct ElementMatrices {
  double area;
  std::array<double, 9> mass;
  std::array<double, 9> stiffness;
};

SparseMatrix diagonal(const Eigen::VectorXd& d) {
  SparseMatrix m(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess,
                      const RunConfig& config, const char* what, long step) {
  if (!rhs.allFinite() || !guess.allFinite()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "non-finite %s right-hand side at step %ld", what, step);
    fail(ErrorCode::NonFinite, buf);
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(config.solver_tol);
  cg.setMaxIterations(config.max_iterations);
  cg.compute(A);
  Eigen::VectorXd x = cg.solveWithGuess(rhs, guess);
  if (cg.info() != Eigen::Success) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "CG for %s stalled at step %ld after %ld iterations (residual %.3e)",
                  what, step, static_cast<long>(cg.iterations()), cg.error());
    fail(ErrorCode::SolverStagnation, buf);
  }
  return x;
}

}  // namespace

FemOperators assemble(const TriMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.vertex_count());
  std::vector<ElementMatrices> elems(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](std::size_t e) {
    const auto& tri = mesh.triangles[e];
    for (int v : tri)
      if (v < 0 || v >= n) fail(ErrorCode::Domain, "triangle " + std::to_string(e) + " has an invalid vertex");
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double area = triangle_area(p0, p1, p2);
    if (!(std::abs(area) >= 1e-14)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "triangle %zu is degenerate (area %.3e)", e, area);
      fail(ErrorCode::Domain, buf);
    }
    const double A = std::abs(area);
    const std::array<double, 3> bx{p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const std::array<double, 3> cy{p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    auto& m = elems[e];
    m.area = A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        m.mass[3 * i + j] = A / 12.0 * (i == j ? 2.0 : 1.0);
        m.stiffness[3 * i + j] = (bx[i] * bx[j] + cy[i] * cy[j]) / (4.0 * A);
      }
  });
  std::vector<Triplet> mt, kt;
  mt.reserve(9 * elems.size());
  kt.reserve(9 * elems.size());
  FemOperators ops;
  for (std::size_t e = 0; e < elems.size(); ++e) {
    const auto& tri = mesh.triangles[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        mt.emplace_back(tri[i], tri[j], elems[e].mass[3 * i + j]);
        kt.emplace_back(tri[i], tri[j], elems[e].stiffness[3 * i + j]);
      }
    ops.area += elems[e].area;
  }
  ops.mass.resize(n, n);
  ops.stiffness.resize(n, n);
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());
  ops.lumped = ops.mass * Eigen::VectorXd::Ones(n);
  return ops;
}

FemState uniform_steady_state(const KineticParams& p, std::size_t vertex_count) {
  const auto ss = steady_state(p.alpha, p.beta);
  FemState s;
  s.u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(vertex_count), ss.u);
  s.v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(vertex_count), ss.v);
  return s;
}

FemState initial_conditions(const KineticParams& p, const TriMesh& mesh) {
  FemState s = uniform_steady_state(p, mesh.vertex_count());
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const auto [x, y] = mesh.vertices[i];
    double sum = 0.0;
    for (int k = 1; k <= 8; ++k) sum += std::cos(k * pi * x);
    const double delta = 0.0016 * std::cos(2.0 * pi * (x + y)) + 0.01 * sum;
    s.u[i] += delta;
    s.v[i] += delta;
  }
  return s;
}

std::string_view to_string(ReactionScheme scheme) noexcept {
  return scheme == ReactionScheme::LinearlyImplicit ? "linearly-implicit" : "explicit";
}

ReactionScheme parse_reaction_scheme(std::string_view text) {
  if (text == "linearly-implicit") return ReactionScheme::LinearlyImplicit;
  if (text == "explicit") return ReactionScheme::Explicit;
  fail(ErrorCode::Usage, "unknown reaction scheme '" + std::string(text) +
                             "' (expected linearly-implicit or explicit)");
}

void validate(const RunConfig& c) {
  const auto& p = c.params;
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.d > 0.0) || !(p.gamma >= 0.0) ||
      !std::isfinite(p.alpha + p.beta + p.gamma + p.d))
    fail(ErrorCode::Domain, "alpha, beta and d must be positive and gamma non-negative");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail(ErrorCode::Domain, "dt must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) fail(ErrorCode::Domain, "t_end must be positive");
  if (!(c.threshold > 0.0)) fail(ErrorCode::Domain, "threshold must be positive");
  if (!(c.solver_tol > 0.0) || c.max_iterations < 1)
    fail(ErrorCode::Domain, "solver tolerance and iteration cap must be positive");
  if (c.snapshot_interval < 0.0) fail(ErrorCode::Domain, "snapshot interval must be non-negative");
}

ImexStepper::ImexStepper(const FemOperators& ops, const RunConfig& config)
    : ops_(ops), config_(config) {
  validate(config);
  const double dt = config.dt, g = config.params.gamma, d = config.params.d;
  time_mass_ = config.lumped_mass ? diagonal(ops.lumped) : ops.mass;
  u_matrix_ = time_mass_ + dt * ops.stiffness;
  if (config.scheme == ReactionScheme::LinearlyImplicit)
    u_matrix_ += diagonal((dt * g) * ops.lumped);
  v_base_ = time_mass_ + (dt * d) * ops.stiffness;
}

FemState ImexStepper::step(const FemState& s) const {
  const auto& p = config_.params;
  const double dt = config_.dt, g = p.gamma;
  FemState next;
  next.step = s.step + 1;
  next.t = next.step * dt;
  const Eigen::VectorXd u2v = s.u.array().square() * s.v.array();
  if (config_.scheme == ReactionScheme::LinearlyImplicit) {
    const Eigen::VectorXd rhs_u =
        time_mass_ * s.u + (dt * g) * (ops_.lumped.array() * (p.alpha + u2v.array())).matrix();
    next.u = solve(u_matrix_, rhs_u, s.u, config_, "u", next.step);
    const SparseMatrix v_matrix =
        v_base_ + diagonal((dt * g) * (ops_.lumped.array() * next.u.array().square()).matrix());
    const Eigen::VectorXd rhs_v = time_mass_ * s.v + (dt * g * p.beta) * ops_.lumped;
    next.v = solve(v_matrix, rhs_v, s.v, config_, "v", next.step);
  } else {
    const Eigen::VectorXd f = (p.alpha - s.u.array() + u2v.array()).matrix();
    const Eigen::VectorXd gk = (p.beta - u2v.array()).matrix();
    next.u = solve(u_matrix_, time_mass_ * (s.u + (dt * g) * f), s.u, config_, "u", next.step);
    next.v = solve(v_base_, time_mass_ * (s.v + (dt * g) * gk), s.v, config_, "v", next.step);
  }
  if (!next.u.allFinite() || !next.v.allFinite()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "non-finite state at step %ld (t=%.6g)", next.step, next.t);
    fail(ErrorCode::NonFinite, buf);
  }
  return next;
}

std::pair<double, double> l2_time_derivative(const FemState& prev, const FemState& next, double dt,
                                             const FemOperators& ops) {
  if (!(dt > 0.0)) fail(ErrorCode::Domain, "dt must be positive");
  const Eigen::VectorXd du = next.u - prev.u, dv = next.v - prev.v;
  const double qu = du.dot(ops.mass * du), qv = dv.dot(ops.mass * dv);
  return {std::sqrt(std::max(qu, 0.0)) / dt, std::sqrt(std::max(qv, 0.0)) / dt};
}

std::string_view to_string(Termination t) noexcept {
  return t == Termination::Threshold ? "threshold" : "end_time";
}

RunRecord simulate(const FemOperators& ops, const FemState& initial, const RunConfig& config) {
  const ImexStepper stepper(ops, config);
  RunRecord run;
  run.config = config;
  run.snapshots.push_back(initial);
  const long total = std::max(1L, std::lround(config.t_end / config.dt));
  const long every =
      config.snapshot_interval > 0.0 ? std::max(1L, std::lround(config.snapshot_interval / config.dt)) : 0;
  FemState state = initial;
  run.monitor.reserve(static_cast<std::size_t>(total));
  for (long n = 0; n < total; ++n) {
    FemState next = stepper.step(state);
    const auto [ru, rv] = l2_time_derivative(state, next, config.dt, ops);
    run.monitor.push_back({next.t, ru, rv});
    state = std::move(next);
    const bool done = state.step >= config.min_steps && ru < config.threshold && rv < config.threshold;
    if (done) run.termination = Termination::Threshold;
    if (done || n + 1 == total) break;
    if (every > 0 && state.step % every == 0) run.snapshots.push_back(state);
  }
  run.snapshots.push_back(state);
  run.final_state = std::move(state);
  return run;
}

double nodal_range(const Eigen::VectorXd& values) {
  return values.size() == 0 ? 0.0 : values.maxCoeff() - values.minCoeff();
}

EpisodeReport analyse_episodes(const std::vector<MonitorSample>& monitor, std::size_t layer_steps,
                               double rise_ratio) {
  EpisodeReport rep;
  if (monitor.size() <= layer_steps) return rep;
  std::vector<double> m(monitor.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(monitor[i].rate_u, monitor[i].rate_v);
  rep.transient_peak = layer_steps;
  for (std::size_t i = layer_steps; i < m.size(); ++i)
    if (m[i] > m[rep.transient_peak]) rep.transient_peak = i;
  double prev = m[rep.transient_peak];
  for (std::size_t i = rep.transient_peak + 1; i + 1 < m.size(); ++i) {
    if (!(m[i] > m[i - 1] && m[i] >= m[i + 1])) continue;
    rep.max_rise = std::max(rep.max_rise, m[i] / prev);
    if (m[i] >= rise_ratio * prev) rep.episodes.push_back(i);
    prev = m[i];
  }
  return rep;
}

std::string snapshot_text(const TriMesh& mesh, const FemState& state) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "# t=%.10g step=%ld\n", state.t, state.step);
  out += buf;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g %.10g\n", mesh.vertices[i].x, mesh.vertices[i].y,
                  state.u[i], state.v[i]);
    out += buf;
  }
  return out;
}

std::string monitor_csv(const std::vector<MonitorSample>& monitor) {
  std::string out = "t,rate_u,rate_v\n";
  char buf[96];
  for (const auto& m : monitor) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", m.t, m.rate_u, m.rate_v);
    out += buf;
  }
  return out;
}

nlohmann::json run_summary(const RunRecord& run, const TriMesh& mesh) {
  nlohmann::json j;
  j["config"] = run_config_json(run.config);
  j["mesh"] = {{"vertices", mesh.vertex_count()},
               {"triangles", mesh.triangle_count()},
               {"h", mesh.h},
               {"min_quality", mesh.quality.min_quality}};
  j["termination"] = std::string(to_string(run.termination));
  j["final_t"] = run.final_state.t;
  j["steps"] = run.final_state.step;
  j["u_range"] = nodal_range(run.final_state.u);
  return j;
}

nlohmann::json run_config_json(const RunConfig& c) {
  nlohmann::json j;
  j["alpha"] = c.params.alpha;
  j["beta"] = c.params.beta;
  j["gamma"] = c.params.gamma;
  j["d"] = c.params.d;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["threshold"] = c.threshold;
  j["min_steps"] = c.min_steps;
  j["lumped_mass"] = c.lumped_mass;
  j["scheme"] = std::string(to_string(c.scheme));
  j["solver_tol"] = c.solver_tol;
  j["max_iterations"] = c.max_iterations;
  j["snapshot_interval"] = c.snapshot_interval;
  return j;
}

std::vector<std::string> export_run(const RunRecord& run, const TriMesh& mesh,
                                    const std::filesystem::path& dir) {
  std::vector<std::string> files;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.txt", i);
    write_text(dir / name, snapshot_text(mesh, run.snapshots[i]));
    files.emplace_back(name);
  }
  write_text(dir / "monitor.csv", monitor_csv(run.monitor));
  files.emplace_back("monitor.csv");
  return files;
}

}  // namespace ard
