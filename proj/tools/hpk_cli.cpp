// Batch front end: checks, tables, sampling, experiments, basis dumps.
//
// Exit codes: 0 success, 1 failed check / experiment / sampler, 2 invalid run spec.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hpk/checks.hpp"
#include "hpk/error.hpp"
#include "hpk/kernels.hpp"
#include "hpk/line_basis.hpp"
#include "hpk/opuc.hpp"
#include "hpk/parallel.hpp"
#include "hpk/report.hpp"
#include "hpk/sampling.hpp"
#include "hpk/weights.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag name -> help text. Every key is also accepted in the config file.
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"s", "ensemble parameter s"},
    {"N", "rank / matrix size"},
    {"n", "degree for phi_n"},
    {"eps", "window half-width"},
    {"R", "truncation radius"},
    {"sigma", "Gaussian damping"},
    {"sprime", "shifted parameter s'"},
    {"m", "proxy rank for the damped projection"},
    {"M", "matrix size for the gamma1 experiment"},
    {"draws", "number of draws"},
    {"seed", "RNG seed"},
    {"grid", "grid a:b:count"},
    {"jobs", "worker threads (0: all available)"},
    {"out", "output path"},
    {"method", "sampler: spectral or mcmc"},
    {"grid-points", "initial sampler grid size"},
    {"burn-in", "MCMC burn-in sweeps"},
    {"thinning", "MCMC sweeps between states"},
    {"replay", "sample sidecar to replay"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    bool known = false;
    for (const auto& k : kKeys) known = known || k.first == key;
    if (!known) throw SpecError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(d))
    throw SpecError("--" + key + ": not a finite number: '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  long long i = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), i);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw SpecError("--" + key + ": not an integer: '" + v + "'");
  return i;
}

struct Spec {
  std::string command;
  std::string target;
  std::map<std::string, std::string> values;  // merged: flags > config file

  bool has(const std::string& k) const { return values.count(k) > 0; }
  double num(const std::string& k, double def) const { return has(k) ? to_double(k, values.at(k)) : def; }
  long long integer(const std::string& k, long long def) const { return has(k) ? to_int(k, values.at(k)) : def; }
  std::string str(const std::string& k, const std::string& def) const { return has(k) ? values.at(k) : def; }

  json to_json() const {
    json j = {{"command", command}, {"target", target}};
    json v = json::object();
    for (const auto& [k, val] : values) v[k] = val;
    j["params"] = v;
    return j;
  }
};

std::vector<double> parse_grid(const std::string& g) {
  std::vector<std::string> parts;
  std::stringstream ss(g);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) throw SpecError("--grid must look like a:b:count");
  const double a = to_double("grid", parts[0]), b = to_double("grid", parts[1]);
  const long long n = to_int("grid", parts[2]);
  if (n < 1 || n > 100'000) throw SpecError("--grid count must lie in [1, 100000]");
  if (n > 1 && !(b > a)) throw SpecError("--grid needs a < b");
  std::vector<double> out(n);
  for (long long i = 0; i < n; ++i) out[i] = (n == 1) ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

void require_nonzero_grid(const std::vector<double>& g) {
  for (double x : g)
    if (x == 0.0) throw SpecError("--grid must exclude 0");
}

hpk::checks::RunParams run_params(const Spec& sp) {
  hpk::checks::RunParams p;
  if (sp.has("s")) p.s = sp.num("s", 0.0);
  p.N = static_cast<int>(sp.integer("N", p.N));
  p.n = static_cast<int>(sp.integer("n", p.n));
  p.eps = sp.num("eps", p.eps);
  p.R = sp.num("R", p.R);
  p.sigma = sp.num("sigma", p.sigma);
  p.s_prime = sp.num("sprime", p.s_prime);
  p.m = static_cast<int>(sp.integer("m", p.m));
  p.M = static_cast<int>(sp.integer("M", p.M));
  p.draws = static_cast<int>(sp.integer("draws", 0));
  const long long seed = sp.integer("seed", 1);
  if (seed < 0) throw SpecError("--seed must be nonnegative");
  p.seed = static_cast<std::uint64_t>(seed);
  const long long jobs = sp.integer("jobs", 1);
  if (jobs < 0) throw SpecError("--jobs must be >= 0");
  p.jobs = jobs == 0 ? hpk::par::max_threads() : static_cast<int>(jobs);
  if (p.N < 1) throw SpecError("--N must be >= 1");
  if (p.n < 1) throw SpecError("--n must be >= 1");
  if (!(p.eps > 0.0)) throw SpecError("--eps must be positive");
  if (!(p.R > 0.0)) throw SpecError("--R must be positive");
  if (!(p.sigma > 0.0)) throw SpecError("--sigma must be positive");
  if (p.draws < 0) throw SpecError("--draws must be >= 0");
  return p;
}

std::string output_path(const Spec& sp, const std::string& default_name) {
  if (sp.has("out")) return sp.values.at("out");
  const char* env = std::getenv("HPK_DATA_DIR");
  const std::filesystem::path dir = (env && *env) ? env : "hpk_data";
  return (dir / default_name).string();
}

void emit(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  hpk::report::write_text(path, content);
  std::cerr << "wrote " << path << "\n";
}

int report_exit(const json& rep, const std::string& path) {
  emit(path, hpk::report::dump_json(rep));
  int failed = 0;
  for (const auto& c : rep.at("cells"))
    if (c.at("asserted").get<bool>() && !c.at("pass").get<bool>()) {
      ++failed;
      std::cerr << "FAIL " << c.at("inputs").dump() << " value=" << hpk::report::fmt(c.at("value").get<double>())
                << " bound=" << hpk::report::fmt(c.at("bound").get<double>()) << "\n";
    }
  std::cerr << (rep.at("pass").get<bool>() ? "PASS " : "FAIL ") << rep.at("experiment").get<std::string>() << " ("
            << rep.at("cells").size() << " cells, " << failed << " failed)\n";
  return rep.at("pass").get<bool>() ? 0 : 1;
}

int cmd_check(const Spec& sp) {
  const auto p = run_params(sp);
  json rep = hpk::checks::run_check(sp.target, p);
  rep["runspec"] = sp.to_json();
  return report_exit(rep, output_path(sp, "check_" + sp.target + ".json"));
}

int cmd_experiment(const Spec& sp) {
  const auto p = run_params(sp);
  json rep = hpk::checks::run_experiment(sp.target, p);
  rep["runspec"] = sp.to_json();
  return report_exit(rep, output_path(sp, "experiment_" + sp.target + ".json"));
}

int cmd_table(const Spec& sp) {
  const auto p = run_params(sp);
  const double s = p.s.value_or(0.0);
  const auto grid = parse_grid(sp.str("grid", "0.1:3:50"));
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  if (sp.target == "kernel") {
    require_nonzero_grid(grid);
    if (!(s > -0.5)) throw SpecError("table kernel needs s > -1/2");
    const hpk::FiniteKernel k(hpk::HPParam::make(s), p.N);
    const auto vals = hpk::par::kernel_table_parallel(k, grid, p.jobs);
    header = {"x", "y", "value"};
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) rows.push_back({grid[i], grid[j], vals[i * grid.size() + j]});
  } else if (sp.target == "weight") {
    require_nonzero_grid(grid);
    const auto hp = hpk::HPParam::make(s);
    const hpk::CircleWeight cw{hp, hpk::WeightKind::lambda};
    header = {"x", "line_weight", "theta", "circle_weight"};
    for (double x : grid) {
      const double th = hpk::cayley(x);
      rows.push_back({x, hpk::eval_line_weight(hp, p.N, x), th, hpk::eval_circle_weight(cw, th)});
    }
  } else if (sp.target == "vfunction") {
    require_nonzero_grid(grid);
    if (!(s > -0.5)) throw SpecError("table vfunction needs s > -1/2");
    const hpk::VFunction v(s);
    header = {"x", "V"};
    for (double x : grid) rows.push_back({x, v.eval(x)});
  } else if (sp.target == "phi_n") {
    if (!(s > -0.5)) throw SpecError("table phi_n needs s > -1/2");
    if (p.n > hpk::kOpucDegreeCap) throw SpecError("--n exceeds the basis degree cap");
    const hpk::RescaledCircleKernel k(hpk::HPParam::make(s), p.n);
    header = {"alpha", "beta", "re", "im"};
    for (double a : grid)
      for (double b : grid) {
        const auto v = k.eval(a, b);
        rows.push_back({a, b, v.real(), v.imag()});
      }
  } else {
    throw SpecError("unknown table kind '" + sp.target + "' (kernel, weight, vfunction, phi_n)");
  }
  emit(output_path(sp, "table_" + sp.target + ".csv"), hpk::report::csv_with_runspec(sp.to_json(), header, rows));
  return 0;
}

hpk::SampleRequest sample_request(const Spec& sp) {
  const auto p = run_params(sp);
  hpk::SampleRequest req;
  req.s = p.s.value_or(0.0);
  req.N = p.N;
  req.draws = p.draws > 0 ? p.draws : 100;
  req.cfg.seed = p.seed;
  const std::string method = sp.str("method", "spectral");
  if (method == "spectral") req.cfg.method = hpk::SamplerMethod::spectral_dpp;
  else if (method == "mcmc") req.cfg.method = hpk::SamplerMethod::mcmc;
  else throw SpecError("--method must be spectral or mcmc");
  req.cfg.grid_points = static_cast<int>(sp.integer("grid-points", req.cfg.grid_points));
  req.cfg.burn_in = static_cast<int>(sp.integer("burn-in", req.cfg.burn_in));
  req.cfg.thinning = static_cast<int>(sp.integer("thinning", req.cfg.thinning));
  if (sp.has("R")) req.cfg.R = p.R;
  req.cfg.validate();
  if (!(req.s > -0.5)) throw SpecError("sampling needs s > -1/2");
  return req;
}

int cmd_sample(const Spec& sp) {
  hpk::SampleRequest req;
  if (sp.has("replay")) {
    try {
      const json side = json::parse(hpk::report::read_text(sp.values.at("replay")));
      req = hpk::SampleRequest::from_json(side.at("request"));
    } catch (const json::exception& e) {
      throw SpecError(std::string("bad sidecar: ") + e.what());
    }
  } else {
    req = sample_request(sp);
  }
  const auto p = run_params(sp);
  hpk::SampleRun run;
  try {
    run = hpk::run_sample_request(req, p.jobs);
  } catch (const hpk::InvalidSpec&) {
    throw;
  } catch (const hpk::Error& e) {
    std::cerr << "sampler failure: " << e.what() << "\n";
    return 1;
  }
  if (run.report.contains("warning") && !run.report["warning"].get<std::string>().empty())
    std::cerr << "warning: " << run.report["warning"].get<std::string>() << "\n";
  const std::string path = output_path(sp, "sample.csv");
  emit(path, hpk::sample_archive_csv(req, run));
  if (path != "-") {
    const json side = {{"request", req.to_json()}, {"report", run.report}, {"archive", path}};
    emit(path + ".json", hpk::report::dump_json(side));
  } else {
    std::cerr << hpk::report::dump_json(run.report);
  }
  return 0;
}

int cmd_basis(const Spec& sp) {
  const auto p = run_params(sp);
  const double s = p.s.value_or(0.0);
  if (!(s > -0.5)) throw SpecError("basis needs s > -1/2");
  json j;
  if (sp.target == "opuc") {
    if (p.N > hpk::kOpucDegreeCap) throw SpecError("--N exceeds the basis degree cap");
    j = hpk::opuc_to_json(*hpk::build_opuc(hpk::CircleWeight{hpk::HPParam::make(s), hpk::WeightKind::lambda}, p.N));
  } else if (sp.target == "line") {
    j = hpk::line_to_json(*hpk::build_monic_line(hpk::HPParam::make(s), p.N, p.N - 1));
  } else {
    throw SpecError("unknown basis kind '" + sp.target + "' (opuc, line)");
  }
  j["runspec"] = sp.to_json();
  emit(output_path(sp, "basis_" + sp.target + ".json"), hpk::report::dump_json(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hua-Pickrell kernel toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [k, help] : kKeys) opts[k] = app.add_option("--" + k, raw[k], help);
  std::string config;
  app.add_option("--config", config, "key=value config file (flags take precedence)");

  std::string suite, kind, name;
  auto* c_check = app.add_subcommand("check", "run an invariant suite");
  c_check->add_option("suite", suite, "specfun | opuc | kernels | infinite")->required();
  auto* c_table = app.add_subcommand("table", "emit a CSV table");
  c_table->add_option("kind", kind, "kernel | weight | vfunction | phi_n")->required();
  auto* c_sample = app.add_subcommand("sample", "draw configurations and write an archive");
  auto* c_exp = app.add_subcommand("experiment", "run an experiment");
  c_exp->add_option("name", name, "gamma2 | gamma1 | tails | variance | contraction")->required();
  auto* c_basis = app.add_subcommand("basis", "dump an orthogonal-polynomial basis as JSON");
  c_basis->add_option("kind", kind, "opuc | line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Spec sp;
    std::map<std::string, std::string> file;
    if (!config.empty()) file = read_config(config);
    for (const auto& [k, help] : kKeys) {
      (void)help;
      if (opts[k]->count() > 0) sp.values[k] = raw[k];
      else if (file.count(k)) sp.values[k] = file[k];
    }
    if (c_check->parsed()) {
      sp.command = "check";
      sp.target = suite;
      return cmd_check(sp);
    }
    if (c_table->parsed()) {
      sp.command = "table";
      sp.target = kind;
      return cmd_table(sp);
    }
    if (c_sample->parsed()) {
      sp.command = "sample";
      return cmd_sample(sp);
    }
    if (c_exp->parsed()) {
      sp.command = "experiment";
      sp.target = name;
      return cmd_experiment(sp);
    }
    if (c_basis->parsed()) {
      sp.command = "basis";
      sp.target = kind;
      return cmd_basis(sp);
    }
  } catch (const SpecError& e) {
    std::cerr << "invalid run spec: " << e.what() << "\n";
    return 2;
  } catch (const hpk::InvalidSpec& e) {
    std::cerr << "invalid run spec: " << e.what() << "\n";
    return 2;
  } catch (const hpk::DomainError& e) {
    std::cerr << "invalid run spec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
