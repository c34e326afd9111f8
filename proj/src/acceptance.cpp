#include "ard/acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "ard/error.hpp"
#include "ard/fem.hpp"
#include "ard/parallel.hpp"
#include "ard/partition.hpp"

namespace ard {
namespace {

// Reference eigenvalue roots eta_{k,l} on a = 1/2, b = 1, rows k = 1..12,
// columns l = 0.3, 1.3, ..., 11.3.
constexpr double kEtaTable[12][12] = {
    {7.1027, 7.5122, 7.8501, 8.2427, 8.7082, 9.2225, 9.7582, 10.2961, 10.8254, 11.3407, 11.8399, 12.3228},
    {12.6266, 12.4983, 12.4927, 12.7075, 13.1098, 13.631, 14.2134, 14.8198, 15.429, 16.0304, 16.6187, 17.192},
    {18.1149, 17.4447, 17.0769, 17.0888, 17.3997, 17.8974, 18.4949, 19.1376, 19.7947, 20.4503, 21.0965, 21.7296},
    {23.5924, 22.3758, 21.6362, 21.433, 21.6385, 22.0976, 22.6942, 23.3568, 24.0452, 24.7384, 25.4257, 26.1021},
    {29.0652, 27.2996, 26.1827, 25.7575, 25.8495, 26.2611, 26.8475, 27.5201, 28.2297, 28.9502, 29.6684, 30.3779},
    {34.5354, 32.2191, 30.7217, 30.0701, 30.0436, 30.4021, 30.972, 31.6483, 32.3724, 33.1135, 33.8557, 34.5913},
    {40.0041, 37.1361, 35.2559, 34.375, 34.2266, 34.5281, 35.0775, 35.7529, 36.4869, 37.2437, 38.005, 38.7618},
    {45.4719, 42.0513, 39.7869, 38.6747, 38.402, 38.6438, 39.1696, 39.8409, 40.5813, 41.3503, 42.1272, 42.9014},
    {50.9391, 46.9654, 44.3157, 42.9706, 42.5719, 42.7519, 43.2519, 43.9168, 44.661, 45.4396, 46.2291, 47.018},
    {56.4057, 51.8786, 48.8427, 47.2638, 46.7376, 46.8544, 47.3268, 47.9834, 48.7296, 49.5155, 50.3156, 51.117},
    {61.8721, 56.7912, 53.3685, 51.5549, 50.9003, 50.9526, 51.3961, 52.0428, 52.7894, 53.5811, 54.3901, 55.2021},
    {67.3382, 61.7032, 57.8933, 55.8444, 55.0605, 55.0474, 55.461, 56.0967, 56.8423, 57.6385, 58.4549, 59.2761},
};

constexpr double kTableTol = 1e-3;
constexpr double kIdentityTol = 1e-12;
constexpr double kCollocationTol = 1e-6;
constexpr double kCurveTol = 1e-8;
constexpr double kFixedPointTol = 1e-12;
constexpr double kPatternRange = 0.1;
constexpr double kMeshCountTol = 0.05;
constexpr double kMinQuality = 0.3;
constexpr double kAreaTol = 0.01;

constexpr int kReferenceTriangles = 6340;
constexpr int kReferenceVertices = 3333;

using Clock = std::chrono::steady_clock;

CriterionResult criterion(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<double> table_ls() {
  std::vector<double> ls;
  for (int j = 0; j < 12; ++j) ls.push_back(0.3 + j);
  return ls;
}

struct Sample {
  int k;
  double l, a, rho;
};

// The random (k, l, a, b) sample shared by criteria 2 and 3; l avoids
// multiples of 1/2, where the closed form is undefined.
std::vector<Sample> mode_sample(std::size_t n) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> kd(0, 12);
  std::uniform_real_distribution<double> ld(0.01, 12.0), ad(0.05, 3.0), rd(0.01, 4.0);
  std::vector<Sample> out;
  while (out.size() < n) {
    const double l = ld(rng);
    const int k = kd(rng);
    const double a = ad(rng), rho = rd(rng);
    if (std::abs(l - std::round(2 * l) / 2) < 1e-6) continue;
    out.push_back({k, l, a, rho});
  }
  return out;
}

SweepSpec window(double d, double gamma, int n = 200) {
  SweepSpec s;
  s.d = d;
  s.gamma = gamma;
  s.n_alpha = s.n_beta = n;
  s.alpha_min = s.beta_min = 1.0 / n;
  return s;
}

std::size_t count(const RegionMap& m, Region r) { return m.counts()[static_cast<int>(r)]; }

// Cells labelled StableNode in `lower` but not in `upper`.
std::size_t lost_nodes(const RegionMap& lower, const RegionMap& upper) {
  std::size_t lost = 0;
  for (std::size_t c = 0; c < lower.labels.size(); ++c)
    lost += lower.labels[c] == Region::StableNode && upper.labels[c] != Region::StableNode;
  return lost;
}

const TriMesh& desk_mesh() {
  static const TriMesh mesh = triangulate_annulus(make_annulus(0.5, 1.0), kDeskMeshEdge);
  return mesh;
}

RunConfig turing_config() {
  RunConfig c;
  c.params = make_params(0.09, 0.45, 250.0, 10.0);
  c.t_end = 100.0;  // threshold is reached near t = 47 on the desk mesh
  return c;
}

RunConfig hopf_config() {
  RunConfig c;
  c.params = make_params(0.05, 0.55, 730.0, 5.0);
  c.t_end = 15.0;
  c.min_steps = std::numeric_limits<int>::max();  // threshold never tested
  return c;
}

struct Context {
  std::filesystem::path work_dir;
  std::optional<RunRecord> turing;  // shared by criteria 9 and 10
};

CriterionResult eta_table() {
  auto r = criterion(1, "eta table reproduction");
  const auto t = spectrum_table({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, table_ls(), make_annulus(0.5, 1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) worst = std::max(worst, std::abs(t.at(i, j) - kEtaTable[i][j]));
  r.passed = worst <= kTableTol;
  r.detail = fmt("max |eta - reference| = %.3e over 144 entries (tol %.0e)", worst, kTableTol);
  return r;
}

CriterionResult superposition(const std::vector<Sample>& sample) {
  auto r = criterion(2, "superposition identity");
  double worst = 0.0;
  for (const auto& s : sample) {
    const auto e = eigenvalue({s.k, s.l}, make_annulus(s.a, s.a + s.rho));
    worst = std::max(worst, rel(e.eta1_sq + e.eta2_sq, e.eta_sq));
  }
  r.passed = worst <= kIdentityTol;
  r.detail = fmt("max relative gap %.3e over %zu samples (tol %.0e)", worst, sample.size(), kIdentityTol);
  return r;
}

CriterionResult weighting_composition(const std::vector<Sample>& sample) {
  auto r = criterion(3, "weighting composition");
  double worst = 0.0;
  bool l0_exact = true;
  for (const auto& s : sample) {
    const double eta_sq = eigenvalue({s.k, s.l}, make_annulus(s.a, s.a + s.rho)).eta_sq;
    worst = std::max(worst, rel(eigenvalue_via_weighting({s.k, s.l}, s.a, s.rho), eta_sq));
    l0_exact = l0_exact && weighting(s.a, s.rho, 0.0) == 1.0 / (s.a * (s.rho + s.a));
  }
  // Ladder rho = 0.01 .. 4 in 1000 steps for the first 50 (a, l) of the sample.
  std::size_t violations = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(50, sample.size()); ++i) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 1000; ++n) {
      const double f = weighting(sample[i].a, 0.01 + n * (4.0 - 0.01) / 999.0, sample[i].l);
      violations += !(f < prev);
      prev = f;
    }
  }
  r.passed = worst <= kIdentityTol && violations == 0 && l0_exact;
  r.detail = fmt("max relative gap %.3e, ladder violations %zu, f(l=0) exact: %s", worst, violations,
                 l0_exact ? "yes" : "no");
  return r;
}

CriterionResult collocation() {
  auto r = criterion(4, "collocation residual");
  const auto geom = make_annulus(0.5, 1.0);
  const auto grid = build_polar_grid(geom, 95, 64);
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k)
    for (double l : {0.3, 1.3}) {
      const ModeIndex mode = make_mode(k, l);
      const double eta = eigenvalue(mode, geom).eta;
      worst = std::max(worst, collocation_residual(EigenfunctionSeries(mode, 1.0, {64, 1e-14}), eta, grid));
    }
  r.passed = worst < kCollocationTol;
  r.detail = fmt("max residual %.3e over 8 modes, N=95, J=64 (tol %.0e)", worst, kCollocationTol);
  return r;
}

CriterionResult set_level() {
  auto r = criterion(5, "region sets and StableNode nesting");
  const auto small = sweep_classify(window(1.4, 1.0));
  const auto large = sweep_classify(window(8.0, 21.0));
  const auto large_curves = transcritical_curve(window(8.0, 21.0), alpha_samples(window(8.0, 21.0), 200));
  const bool small_ok = count(small, Region::HopfInstability) == 0 &&
                        count(small, Region::TranscriticalCurve) == 0;
  const bool large_ok = count(large, Region::HopfInstability) > 0 && !large_curves.empty();

  std::string lost_text, counts_text;
  std::size_t total_lost = 0;
  for (auto form : {DeterminantForm::Consistent, DeterminantForm::Literal}) {
    std::vector<RegionMap> maps;
    for (double d : {8.0, 11.0, 14.0, 17.0, 20.0}) {
      auto s = window(d, 21.0);
      s.form = form;
      maps.push_back(sweep_classify(s));
    }
    std::string lost = std::string(to_string(form)) + ":";
    for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
      const std::size_t n = lost_nodes(maps[i], maps[i + 1]);
      lost += fmt("%s%zu", i ? "," : "", n);
      if (form == DeterminantForm::Consistent) total_lost += n;
    }
    lost_text += (lost_text.empty() ? "" : " ") + lost;
    if (form == DeterminantForm::Consistent)
      for (const auto& m : maps) counts_text += fmt("%s%zu", counts_text.empty() ? "" : ",", count(m, Region::StableNode));
  }
  r.passed = small_ok && large_ok && total_lost == 0;
  r.detail = fmt("(1.4,1) hopf=%zu transcritical=%zu; (8,21) hopf=%zu transcritical points=%zu; "
                 "StableNode counts d=8..20: %s; cells leaving StableNode as d grows: %s",
                 count(small, Region::HopfInstability), count(small, Region::TranscriticalCurve),
                 count(large, Region::HopfInstability), large_curves.size(), counts_text.c_str(),
                 lost_text.c_str());
  return r;
}

CriterionResult curve_agreement() {
  auto r = criterion(6, "curve route agreement");
  double gap = 0.0, residual = 0.0;
  std::size_t points = 0;
  for (auto [d, g] : {std::pair{8.0, 21.0}, std::pair{1.4, 1.0}}) {
    const auto spec = window(d, g);
    const auto set = trace_curves(spec, alpha_samples(spec, 100));
    for (const auto* curve : {&set.discriminant, &set.transcritical})
      for (const auto& p : *curve) {
        gap = std::max(gap, p.method_gap);
        residual = std::max(residual, p.residual);
        ++points;
      }
  }
  r.passed = points > 0 && gap <= kCurveTol && residual <= kCurveTol;
  r.detail = fmt("%zu points, max method gap %.3e, max residual %.3e (tol %.0e)", points, gap, residual,
                 kCurveTol);
  return r;
}

CriterionResult classification_oracle() {
  auto r = criterion(7, "classification oracle");
  std::size_t mismatches = 0, cells = 0;
  for (auto [d, g] : {std::pair{8.0, 21.0}, std::pair{1.4, 1.0}, std::pair{5.0, 730.0}}) {
    const auto map = sweep_classify(window(d, g, 100));
    for (int j = 0; j < 100; ++j)
      for (int i = 0; i < 100; ++i, ++cells) {
        const auto p = map.spec.params(map.spec.alpha_at(i), map.spec.beta_at(j));
        mismatches += first_principles_label(p, map.eta_sq) != map.at(i, j);
      }
  }
  r.passed = mismatches == 0;
  r.detail = fmt("%zu mismatches over %zu cells (3 configurations)", mismatches, cells);
  return r;
}

CriterionResult fixed_point() {
  auto r = criterion(8, "FEM steady-state fixed point");
  const auto ops = assemble(desk_mesh());
  std::mt19937_64 rng(1729);
  std::uniform_real_distribution<double> ab(0.02, 1.0), g(1.0, 800.0), d(0.5, 20.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    RunConfig c;
    c.params = make_params(ab(rng), ab(rng), g(rng), d(rng));
    const ImexStepper stepper(ops, c);
    auto s = uniform_steady_state(c.params, desk_mesh().vertex_count());
    for (int k = 0; k < 1000; ++k) {
      const auto next = stepper.step(s);
      worst = std::max({worst, (next.u - s.u).cwiseAbs().maxCoeff(), (next.v - s.v).cwiseAbs().maxCoeff()});
      s = next;
    }
  }
  r.passed = worst <= kFixedPointTol;
  r.detail = fmt("max per-step drift %.3e over 5 x 1000 steps on %zu triangles (tol %.0e)", worst,
                 desk_mesh().triangle_count(), kFixedPointTol);
  return r;
}

CriterionResult turing_run(Context& ctx) {
  auto r = criterion(9, "Turing regime pattern");
  const auto ops = assemble(desk_mesh());
  const auto c = turing_config();
  ctx.turing = simulate(ops, initial_conditions(c.params, desk_mesh()), c);
  const double range = nodal_range(ctx.turing->final_state.u);
  r.passed = ctx.turing->termination == Termination::Threshold && range > kPatternRange;
  r.detail = fmt("termination=%s at t=%.4g, u range %.4g (needs threshold and > %.1f)",
                 std::string(to_string(ctx.turing->termination)).c_str(), ctx.turing->final_state.t, range,
                 kPatternRange);
  return r;
}

CriterionResult hopf_run(Context& ctx) {
  auto r = criterion(10, "Hopf regime recurrence");
  const auto ops = assemble(desk_mesh());
  const auto c = hopf_config();
  const auto run = simulate(ops, initial_conditions(c.params, desk_mesh()), c);
  const auto hopf = analyse_episodes(run.monitor);
  if (!ctx.turing) {
    const auto t = turing_config();
    ctx.turing = simulate(ops, initial_conditions(t.params, desk_mesh()), t);
  }
  const auto turing = analyse_episodes(ctx.turing->monitor);
  std::string times;
  for (auto i : hopf.episodes) times += fmt("%s%.3g", times.empty() ? "" : ",", run.monitor[i].t);
  r.passed = hopf.episodes.size() >= 2 && turing.monotone_after_transient();
  r.detail = fmt("Hopf run: %zu episodes (t=%s); Turing run: %zu episodes, largest rise %.3f", hopf.episodes.size(),
                 times.c_str(), turing.episodes.size(), turing.max_rise);
  return r;
}

CriterionResult mesh_fidelity() {
  auto r = criterion(11, "reference mesh fidelity");
  const auto geom = make_annulus(0.5, 1.0);
  const auto mesh = triangulate_annulus(geom, kReferenceMeshEdge);
  const double tri_dev = rel(static_cast<double>(mesh.triangle_count()), kReferenceTriangles);
  const double vert_dev = rel(static_cast<double>(mesh.vertex_count()), kReferenceVertices);
  const double area_err = rel(mesh.quality.total_area, geom.area());
  r.passed = tri_dev <= kMeshCountTol && vert_dev <= kMeshCountTol && mesh.quality.min_quality >= kMinQuality &&
             area_err < kAreaTol;
  r.detail = fmt("%zu triangles (%+.2f%%), %zu vertices (%+.2f%%), min quality %.3f, area error %.3f%%",
                 mesh.triangle_count(), 100.0 * (mesh.triangle_count() - double(kReferenceTriangles)) / kReferenceTriangles,
                 mesh.vertex_count(), 100.0 * (mesh.vertex_count() - double(kReferenceVertices)) / kReferenceVertices,
                 mesh.quality.min_quality, 100.0 * area_err);
  return r;
}

std::map<std::string, std::string> digests(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& f : write_reference_artifacts(dir)) out[f] = sha256_file(dir / f);
  return out;
}

CriterionResult determinism(const Context& ctx) {
  auto r = criterion(12, "artifact determinism");
  const unsigned saved = thread_count();
  const unsigned workers = std::max(4u, std::thread::hardware_concurrency());
  std::map<std::string, std::string> serial, threaded;
  try {
    set_thread_count(1);
    serial = digests(ctx.work_dir / "serial");
    set_thread_count(workers);
    threaded = digests(ctx.work_dir / "threaded");
  } catch (...) {
    set_thread_count(saved);
    throw;
  }
  set_thread_count(saved);
  std::size_t differing = 0;
  for (const auto& [file, digest] : serial) {
    const auto it = threaded.find(file);
    differing += it == threaded.end() || it->second != digest;
  }
  r.passed = !serial.empty() && differing == 0 && serial.size() == threaded.size();
  r.detail = fmt("%zu artifacts, %zu digests differ between 1 thread and %u threads", serial.size(), differing,
                 workers);
  return r;
}

}  // namespace

Region first_principles_label(const KineticParams& p, double eta_sq) {
  const double s = p.alpha + p.beta, u = s, v = p.beta / (s * s);
  Eigen::Matrix2d J;
  J << p.gamma * (-1.0 + 2.0 * u * v) - eta_sq, p.gamma * u * u,  //
      -2.0 * p.gamma * u * v, -p.gamma * u * u - p.d * eta_sq;
  const Eigen::Vector2cd ev = J.eigenvalues();
  const double tr = J.trace(), det = J.determinant();
  const double tol = 1e-6 * std::max({1.0, std::abs(tr), std::sqrt(std::abs(det))});
  // (sigma1 - sigma2)^2 is the discriminant; it is negative for a complex pair.
  const double gap = std::norm(ev(0) - ev(1));
  const double disc = std::abs(ev(0).imag()) > 0.0 ? -gap : gap;
  if (std::abs(disc) <= tol) return Region::DiscriminantCurve;
  if (disc < 0.0) {
    const double re = ev(0).real();
    if (2.0 * re < -tol) return Region::StableSpiral;
    if (2.0 * re > tol) return Region::HopfInstability;
    return Region::TranscriticalCurve;
  }
  return (ev(0).real() < 0.0 && ev(1).real() < 0.0) ? Region::StableNode : Region::TuringInstability;
}

std::vector<std::string> write_reference_artifacts(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  const auto geom = make_annulus(0.5, 1.0);

  write_text(dir / "spectrum.csv",
             spectrum_table_csv(spectrum_table({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, table_ls(), geom)));
  files.push_back("spectrum.csv");

  const ModeIndex mode = make_mode(1, 0.3);
  render_phase_plot(EigenfunctionSeries(mode), eigenvalue(mode, geom).eta, build_polar_grid(geom, 32, 64),
                    (dir / "phase_k1_l0.3.ppm").string(), {128});
  files.push_back("phase_k1_l0.3.ppm");

  const auto spec = window(8.0, 21.0);
  for (auto& f : export_region_map(sweep_classify(spec), dir, "regions")) files.push_back(f);
  for (auto& f : export_curves(trace_curves(spec, alpha_samples(spec, 100)), dir, "curves")) files.push_back(f);

  write_mesh_files(desk_mesh(), (dir / "mesh_nodes.txt").string(), (dir / "mesh_elements.txt").string());
  files.push_back("mesh_nodes.txt");
  files.push_back("mesh_elements.txt");

  auto c = turing_config();
  c.t_end = 0.2;
  c.snapshot_interval = 0.1;
  const auto run = simulate(assemble(desk_mesh()), initial_conditions(c.params, desk_mesh()), c);
  std::filesystem::create_directories(dir / "simulation");
  for (auto& f : export_run(run, desk_mesh(), dir / "simulation")) files.push_back("simulation/" + f);
  return files;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s %2d  %-36s (%.2f s)  %s", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds,
             r.detail.c_str());
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  // Runtime budgets in seconds; a criterion over budget fails.
  static const std::map<int, double> budget = {{1, 1.0}, {2, 1.0},  {4, 5.0},   {5, 30.0},
                                               {8, 10.0}, {9, 600.0}, {10, 1200.0}};
  Context ctx{options.work_dir, std::nullopt};
  const auto sample = mode_sample(10000);
  std::vector<std::function<CriterionResult()>> criteria = {
      [] { return eta_table(); },
      [&] { return superposition(sample); },
      [&] { return weighting_composition(sample); },
      [] { return collocation(); },
      [] { return set_level(); },
      [] { return curve_agreement(); },
      [] { return classification_oracle(); },
      [] { return fixed_point(); },
      [&] { return turing_run(ctx); },
      [&] { return hopf_run(ctx); },
      [] { return mesh_fidelity(); },
      [&] { return determinism(ctx); },
  };
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = criteria[i]();
    } catch (const Error& e) {
      r.id = static_cast<int>(i) + 1;
      r.title = "criterion " + std::to_string(r.id);
      r.detail = fmt("error code=%s message=%s", std::string(to_string(e.code())).c_str(), e.what());
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (const auto it = budget.find(r.id); it != budget.end() && r.seconds >= it->second) {
      r.passed = false;
      r.detail += fmt("; over the %.0f s budget", it->second);
    }
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ard
