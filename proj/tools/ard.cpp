// ard: command-line front end. Every option can also be set in an INI file
// passed with --config, under [general] or the subcommand's section; a flag
// on the command line wins over the file, which wins over the default.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "ard/acceptance.hpp"
#include "ard/config.hpp"
#include "ard/error.hpp"
#include "ard/fem.hpp"
#include "ard/parallel.hpp"
#include "ard/partition.hpp"

namespace {

using namespace ard;
namespace fs = std::filesystem;

enum ExitStatus { kOk = 0, kFailure = 1, kUsage = 2, kCriteriaFailed = 3 };

// Options of one subcommand (or the global ones) backed by a config section.
class Section {
 public:
  Section(CLI::App* app, std::string name) : app_(app), name_(std::move(name)) {}

  void add(const std::string& key, const std::string& fallback, const std::string& help) {
    auto& s = settings_[key];
    s.fallback = fallback;
    s.option = app_->add_option("--" + key, s.given, help + " [" + fallback + "]");
    order_.push_back(key);
  }
  void flag(const std::string& key, const std::string& help) {
    auto& s = settings_[key];
    s.fallback = "false";
    s.option = app_->add_flag("--" + key, help);
    s.is_flag = true;
    order_.push_back(key);
  }

  const std::string& name() const { return name_; }
  CLI::App* app() const { return app_; }
  bool declares(const std::string& key) const { return settings_.count(key) != 0; }

  void resolve(const Config& config) {
    for (auto& [key, s] : settings_) {
      std::optional<std::string> flag;
      if (s.option->count() > 0) flag = s.is_flag ? std::string("true") : s.given;
      s.value = ard::resolve(flag, config.raw(name_ + "." + key), s.fallback);
    }
  }

  const std::string& text(const std::string& key) const { return settings_.at(key).value; }
  double real(const std::string& key) const { return parse_double(text(key), name_ + "." + key); }
  int integer(const std::string& key) const { return parse_int(text(key), name_ + "." + key); }
  bool boolean(const std::string& key) const { return parse_bool(text(key), name_ + "." + key); }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream in(text(key));
    for (std::string item; std::getline(in, item, ',');) out.push_back(parse_double(item, name_ + "." + key));
    if (out.empty()) fail(ErrorCode::Config, name_ + "." + key + ": empty list");
    return out;
  }

  nlohmann::json json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& key : order_) j[key] = settings_.at(key).value;
    return j;
  }

 private:
  struct Setting {
    std::string fallback;
    std::string given;
    std::string value;
    CLI::Option* option = nullptr;
    bool is_flag = false;
  };
  CLI::App* app_;
  std::string name_;
  std::map<std::string, Setting> settings_;
  std::vector<std::string> order_;
};

void add_sweep_options(Section& s) {
  s.add("alpha-min", "0.005", "smallest alpha");
  s.add("alpha-max", "1", "largest alpha");
  s.add("beta-min", "0.005", "smallest beta");
  s.add("beta-max", "1", "largest beta");
  s.add("n-alpha", "200", "alpha samples");
  s.add("n-beta", "200", "beta samples");
  s.add("gamma", "1", "reaction scale");
  s.add("d", "1", "diffusion ratio");
  s.add("k", "0", "mode counter");
  s.add("l", "0.27", "mode order");
  s.add("a", "0.5", "inner radius");
  s.add("b", "1", "outer radius");
}

SweepSpec sweep_from(const Section& s, DeterminantForm form) {
  SweepSpec spec;
  spec.alpha_min = s.real("alpha-min");
  spec.alpha_max = s.real("alpha-max");
  spec.beta_min = s.real("beta-min");
  spec.beta_max = s.real("beta-max");
  spec.n_alpha = s.integer("n-alpha");
  spec.n_beta = s.integer("n-beta");
  spec.gamma = s.real("gamma");
  spec.d = s.real("d");
  spec.mode = make_mode(s.integer("k"), s.real("l"));
  spec.a = s.real("a");
  spec.b = s.real("b");
  spec.form = form;
  validate(spec);
  return spec;
}

std::string list_text(double first, double step, int count) {
  std::string out;
  for (int i = 0; i < count; ++i) out += (i ? "," : "") + format_g(first + step * i);
  return out;
}

struct Outcome {
  std::vector<std::string> outputs;
  int status = kOk;
};

struct Cli {
  CLI::App app{"Reaction-diffusion on an annulus: spectrum, stability partitions and FEM runs", "ard"};
  std::string config_path;
  std::vector<std::unique_ptr<Section>> sections;

  Section& section(CLI::App* sub, const std::string& name) {
    sections.push_back(std::make_unique<Section>(sub, name));
    return *sections.back();
  }
};

Outcome spectrum_cmd(const Section& s, const fs::path& out) {
  std::vector<int> ks;
  for (double k : s.list("k")) {
    if (k != std::floor(k)) fail(ErrorCode::Config, "spectrum.k: mode counters are integers");
    ks.push_back(static_cast<int>(k));
  }
  const auto table = spectrum_table(ks, s.list("l"), make_annulus(s.real("a"), s.real("b")));
  write_text(out / "spectrum.csv", spectrum_table_csv(table));
  std::printf("wrote %zu eigenvalues to %s\n", table.eta.size(), (out / "spectrum.csv").c_str());
  return {{"spectrum.csv"}};
}

Outcome eigenmode_cmd(const Section& s, const fs::path& out) {
  const auto geom = make_annulus(s.real("a"), s.real("b"));
  const ModeIndex mode = make_mode(s.integer("k"), s.real("l"));
  const auto e = eigenvalue(mode, geom);
  const EigenfunctionSeries series(mode, 1.0, {s.integer("terms"), 1e-14});
  const auto grid = build_polar_grid(geom, s.integer("N"), s.integer("M"));
  const std::string stem = "phase_k" + std::to_string(mode.k) + "_l" + format_g(mode.l);
  render_phase_plot(series, e.eta, grid, (out / (stem + ".ppm")).string(), {s.integer("size")});
  const nlohmann::json info = {{"k", mode.k},
                               {"l", mode.l},
                               {"eta", e.eta},
                               {"eta_sq", e.eta_sq},
                               {"eta1_sq", e.eta1_sq},
                               {"eta2_sq", e.eta2_sq},
                               {"collocation_residual", collocation_residual(series, e.eta, grid)}};
  write_text(out / (stem + ".json"), info.dump(2) + "\n");
  std::printf("%s\n", info.dump(2).c_str());
  return {{stem + ".ppm", stem + ".json"}};
}

Outcome classify_cmd(const Section& s, const fs::path& out, DeterminantForm form) {
  auto spec = sweep_from(s, form);
  spec.k_max = s.integer("k-max");
  const auto map = sweep_classify(spec);
  auto files = export_region_map(map, out, "regions");
  const auto summary = region_summary(map);
  write_text(out / "regions_summary.json", summary.dump(2) + "\n");
  files.push_back("regions_summary.json");
  std::printf("%s\n", summary.dump(2).c_str());
  return {files};
}

Outcome curves_cmd(const Section& s, const fs::path& out, DeterminantForm form) {
  const auto spec = sweep_from(s, form);
  CurveOptions options;
  options.bisection_samples = s.integer("samples");
  const auto set = trace_curves(spec, alpha_samples(spec, s.integer("alphas")), options);
  auto files = export_curves(set, out, "curves");
  const auto summary = curves_summary(set);
  write_text(out / "curves_summary.json", summary.dump(2) + "\n");
  files.push_back("curves_summary.json");
  std::printf("%s\n", summary.dump(2).c_str());
  return {files};
}

Outcome simulate_cmd(const Section& s, const fs::path& out) {
  RunConfig c;
  c.params = make_params(s.real("alpha"), s.real("beta"), s.real("gamma"), s.real("d"));
  c.dt = s.real("dt");
  c.t_end = s.real("t-end");
  c.threshold = s.real("threshold");
  c.min_steps = s.integer("min-steps");
  c.lumped_mass = s.boolean("lumped");
  c.scheme = parse_reaction_scheme(s.text("scheme"));
  c.solver_tol = s.real("solver-tol");
  c.snapshot_interval = s.real("snapshot-interval");
  validate(c);
  const auto mesh = triangulate_annulus(make_annulus(s.real("a"), s.real("b")), s.real("edge"));
  const auto run = simulate(assemble(mesh), initial_conditions(c.params, mesh), c);
  auto files = export_run(run, mesh, out);
  const auto summary = run_summary(run, mesh);
  write_text(out / "run_summary.json", summary.dump(2) + "\n");
  files.push_back("run_summary.json");
  std::printf("termination=%s t=%s u_range=%s\n", std::string(to_string(run.termination)).c_str(),
              format_g(run.final_state.t).c_str(), format_g(nodal_range(run.final_state.u)).c_str());
  return {files};
}

Outcome mesh_cmd(const Section& s, const fs::path& out) {
  MeshOptions options;
  options.max_iterations = s.integer("max-iterations");
  const auto geom = make_annulus(s.real("a"), s.real("b"));
  const auto mesh = triangulate_annulus(geom, s.real("edge"), options);
  write_mesh_files(mesh, (out / "mesh_nodes.txt").string(), (out / "mesh_elements.txt").string());
  const nlohmann::json summary = {{"vertices", mesh.vertex_count()},
                                  {"triangles", mesh.triangle_count()},
                                  {"edges", mesh.edge_count()},
                                  {"h", mesh.h},
                                  {"min_quality", mesh.quality.min_quality},
                                  {"mean_quality", mesh.quality.mean_quality},
                                  {"area", mesh.quality.total_area},
                                  {"exact_area", geom.area()},
                                  {"iterations", mesh.quality.iterations}};
  write_text(out / "mesh_summary.json", summary.dump(2) + "\n");
  std::printf("%s\n", summary.dump(2).c_str());
  return {{"mesh_nodes.txt", "mesh_elements.txt", "mesh_summary.json"}};
}

// Runs the acceptance criteria, then writes the reference artifacts whose
// digests go into the manifest. Timings are printed but not written.
Outcome verify_cmd(const fs::path& out) {
  AcceptanceOptions options;
  options.work_dir = out / "verify_work";
  options.on_result = [](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
  };
  int failed = 0;
  for (const auto& r : run_acceptance(options)) failed += !r.passed;
  std::printf("%d of 12 criteria failed\n", failed);
  fs::remove_all(options.work_dir);
  Outcome o;
  for (auto& f : write_reference_artifacts(out / "reference")) o.outputs.push_back("reference/" + f);
  o.status = failed == 0 ? kOk : kCriteriaFailed;
  return o;
}

void check_config_keys(const Config& config, const std::vector<std::unique_ptr<Section>>& sections) {
  for (const auto& key : config.keys()) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) fail(ErrorCode::Config, "key '" + key + "' is outside any [section]");
    const std::string name = key.substr(0, dot), field = key.substr(dot + 1);
    const auto it = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s->name() == name; });
    if (it == sections.end()) fail(ErrorCode::Config, "unknown section [" + name + "]");
    if (!(*it)->declares(field)) fail(ErrorCode::Config, "unknown key '" + field + "' in [" + name + "]");
  }
}

int report(ErrorCode code, const std::string& message) {
  std::fprintf(stderr, "error code=%s message=%s\n", std::string(to_string(code)).c_str(), message.c_str());
  return code == ErrorCode::Usage ? kUsage : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  Cli cli;
  auto& app = cli.app;
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.add_option("--config", cli.config_path, "INI file with [general] and per-subcommand sections");

  auto& general = cli.section(&app, "general");
  general.add("out", ".", "output directory");
  general.add("threads", "0", "worker cap, 0 = all cores");
  general.add("form", "consistent", "determinant form: consistent or paper-literal");
  general.flag("seedless", "assert that no random seed influences the outputs");

  auto& spectrum = cli.section(app.add_subcommand("spectrum", "eigenvalue table as CSV"), "spectrum");
  spectrum.add("a", "0.5", "inner radius");
  spectrum.add("b", "1", "outer radius");
  spectrum.add("k", "1,2,3,4,5,6,7,8,9,10,11,12", "mode counters, comma separated");
  spectrum.add("l", list_text(0.3, 1.0, 12), "mode orders, comma separated");

  auto& eigenmode = cli.section(app.add_subcommand("eigenmode", "phase plot of one eigenfunction"), "eigenmode");
  eigenmode.add("a", "0.5", "inner radius");
  eigenmode.add("b", "1", "outer radius");
  eigenmode.add("k", "1", "mode counter");
  eigenmode.add("l", "0.3", "mode order");
  eigenmode.add("N", "64", "Chebyshev degree");
  eigenmode.add("M", "128", "angular nodes");
  eigenmode.add("terms", "80", "series truncation J");
  eigenmode.add("size", "512", "image side in pixels");

  auto& classify = cli.section(app.add_subcommand("classify", "stability region map"), "classify");
  add_sweep_options(classify);
  classify.add("k-max", "-1", "classify by the most unstable of k = 0..k-max (-1: single mode)");

  auto& curves = cli.section(app.add_subcommand("curves", "discriminant and transcritical curves"), "curves");
  add_sweep_options(curves);
  curves.add("alphas", "100", "alpha samples");
  curves.add("samples", "20000", "bisection scan samples per alpha");

  auto& sim = cli.section(app.add_subcommand("simulate", "finite element run"), "simulate");
  sim.add("alpha", "0.09", "alpha");
  sim.add("beta", "0.45", "beta");
  sim.add("gamma", "250", "reaction scale");
  sim.add("d", "10", "diffusion ratio");
  sim.add("a", "0.5", "inner radius");
  sim.add("b", "1", "outer radius");
  sim.add("edge", format_g(kDeskMeshEdge), "target mesh edge length");
  sim.add("dt", "0.001", "time step");
  sim.add("t-end", "10", "final time");
  sim.add("threshold", "0.0005", "stop when both time-derivative rates fall below");
  sim.add("min-steps", "10", "steps before the threshold is tested");
  sim.add("scheme", "linearly-implicit", "reaction treatment: linearly-implicit or explicit");
  sim.flag("lumped", "lump the time-derivative mass");
  sim.add("solver-tol", "1e-10", "CG relative tolerance");
  sim.add("snapshot-interval", "0", "time between snapshots, 0 = first and last only");

  auto& mesh = cli.section(app.add_subcommand("mesh", "triangulate the annulus"), "mesh");
  mesh.add("a", "0.5", "inner radius");
  mesh.add("b", "1", "outer radius");
  mesh.add("edge", format_g(kDeskMeshEdge), "target edge length");
  mesh.add("max-iterations", "5000", "relaxation cap");

  auto* verify_app = app.add_subcommand("verify", "run the acceptance criteria");
  cli.section(verify_app, "verify");

  if (argc < 2) {
    std::cout << app.help();
    return report(ErrorCode::Usage, "no subcommand given");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(ErrorCode::Usage, e.what());
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return report(ErrorCode::Usage, "no subcommand given");
  }
  CLI::App* chosen = app.get_subcommands().front();

  try {
    Config config;
    nlohmann::json config_file = nullptr;
    if (!cli.config_path.empty()) {
      config = Config::load(cli.config_path);
      check_config_keys(config, cli.sections);
      config_file = {{"path", cli.config_path}, {"sha256", sha256_file(cli.config_path)}};
    }
    for (auto& s : cli.sections) s->resolve(config);

    const int threads = general.integer("threads");
    if (threads < 0) fail(ErrorCode::Config, "general.threads must be >= 0");
    set_thread_count(static_cast<unsigned>(threads));
    const auto form = parse_determinant_form(general.text("form"));
    const fs::path out = general.text("out");
    fs::create_directories(out);

    const std::string name = chosen->get_name();
    Section* own = nullptr;
    for (auto& s : cli.sections)
      if (s->app() == chosen) own = s.get();

    Outcome outcome;
    if (name == "spectrum") outcome = spectrum_cmd(*own, out);
    else if (name == "eigenmode") outcome = eigenmode_cmd(*own, out);
    else if (name == "classify") outcome = classify_cmd(*own, out, form);
    else if (name == "curves") outcome = curves_cmd(*own, out, form);
    else if (name == "simulate") outcome = simulate_cmd(*own, out);
    else if (name == "mesh") outcome = mesh_cmd(*own, out);
    else outcome = verify_cmd(out);

    nlohmann::json record = {
        {"subcommand", name},
        {"version", ARD_VERSION},
        {"config", {{"general", general.json()}, {name, own->json()}}},
        {"config_file", config_file},
        {"seedless", general.boolean("seedless")},
        {"outputs", outcome.outputs},
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
    };
    append_manifest(out, std::move(record));
    return outcome.status;
  } catch (const Error& e) {
    return report(e.code(), e.what());
  } catch (const std::exception& e) {
    return report(ErrorCode::Io, e.what());
  }
}
