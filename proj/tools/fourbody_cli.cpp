// fourbody: command-line front end.
//
// Exit codes: 0 success (criterion: ProvenUnstable), 1 criterion
// Indeterminate or chain failure, 2 input or domain error, 3 numerical
// failure, 4 solver/criterion inconsistency.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fourbody/fourbody.hpp"

namespace {

using namespace fourbody;
using io::json;

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kNumerical = 3, kInconsistent = 4 };

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> pool;
  std::optional<double> cap;
  std::optional<std::string> format;
  std::optional<std::string> out;
};

io::RunConfig resolve(const Globals& g) {
  io::RunConfig c;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(io::kConfigEnv)) path = env;
  }
  if (!path.empty()) io::apply(c, io::parse_json(io::read_text(path), path));
  if (g.seed) c.seed = *g.seed;
  if (g.tol) c.tol = *g.tol;
  if (g.budget) c.budget = *g.budget;
  if (g.pool) c.pool = *g.pool;
  if (g.cap) c.condition_cap = *g.cap;
  if (g.format) c.format = io::parse_format(*g.format);
  if (g.out) c.out = *g.out;
  io::validate(c);
  return c;
}

json header(const std::string& command, const io::RunConfig& c) {
  return {{"tool", "fourbody"}, {"version", io::kVersion}, {"command", command},
          {"config", io::to_json(c)}};
}

void write_output(const io::RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw io::InputError("cannot write " + c.out);
  os << text;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return io::format_double(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

/// JSON report, or key,value lines for its scalar fields under --format csv.
void emit_report(io::RunConfig c, const std::string& command, const json& body) {
  if (!c.format) c.format = io::Format::Json;
  json doc = header(command, c);
  doc.update(body);
  std::ostringstream os;
  if (*c.format == io::Format::Json) {
    os << doc.dump(2) << '\n';
  } else {
    io::CsvWriter w(os);
    w.comment(header(command, c).dump());
    w.header({"key", "value"});
    for (const auto& [k, v] : body.items()) {
      if (v.is_primitive()) w.row({k, scalar_text(v)});
    }
  }
  write_output(c, os.str());
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// CSV table by default; under --format json an array of row objects.
void emit_table(io::RunConfig c, const std::string& command, const Table& t) {
  if (!c.format) c.format = io::Format::Csv;
  std::ostringstream os;
  if (*c.format == io::Format::Csv) {
    io::CsvWriter w(os);
    w.comment(header(command, c).dump());
    w.header(t.columns);
    for (const auto& r : t.rows) w.row(r);
  } else {
    json doc = header(command, c);
    json rows = json::array();
    for (const auto& r : t.rows) {
      json o = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = r[i];
      rows.push_back(std::move(o));
    }
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
  }
  write_output(c, os.str());
}

std::string fmt(double x) { return io::format_double(x); }

json frame_json(const JacobiFrame& f) {
  return {{"pairing", to_string(f.pairing)}, {"mu_x", io::number(f.mu_x)},
          {"mu_y", io::number(f.mu_y)},      {"mu_R", io::number(f.mu_R)},
          {"a", io::number(f.a)},            {"b", io::number(f.b)}};
}

// ---------------------------------------------------------------------------

int cmd_criterion(const io::RunConfig& c, const std::string& system_path) {
  const auto sf = io::load_system(system_path);
  const auto v = classify(sf.system);
  json body = frame_json(v.frame);
  body["system"] = io::to_json(sf);
  body["ratio"] = io::number(v.ratio);
  body["critical"] = io::number(v.critical);
  body["verdict"] = to_string(v.classification);
  body["margin"] = io::number(v.margin);
  body["threshold_energy"] = io::number(threshold_energy(v.frame, false));
  emit_report(c, "criterion", body);
  return v.classification == Classification::ProvenUnstable ? kOk : kNegative;
}

int cmd_chain(const io::RunConfig& c, std::optional<double> mu_r, const std::string& system_path,
              std::size_t grid_points, std::size_t envelope_samples) {
  json body;
  double mu;
  if (mu_r) {
    mu = *mu_r;
  } else {
    const auto sf = io::load_system(system_path);
    const auto canon = rescale_to_canonical(build_jacobi(sf.system));
    body["system"] = io::to_json(sf);
    mu = canon.mu_R;
  }
  chain::ChainConfig cfg;
  cfg.alpha_points = cfg.beta_points = grid_points;
  cfg.envelope_samples = envelope_samples;
  cfg.seed = c.seed;
  const auto rep = chain::run_chain_suite(mu, cfg);
  body["mu_R"] = io::number(rep.mu_R);
  body["coefficient"] = io::number(rep.coefficient);
  body["scalar_condition"] = rep.scalar_condition;
  json records = json::array();
  for (const auto& r : rep.records) {
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = io::number(v);
    records.push_back({{"name", r.name},
                       {"pass", r.pass},
                       {"residual", io::number(r.residual)},
                       {"tolerance", io::number(r.tolerance)},
                       {"parameters", params}});
  }
  body["records"] = records;
  body["all_pass"] = rep.all_pass();
  emit_report(c, "chain", body);
  return rep.all_pass() ? kOk : kNegative;
}

int cmd_veff(const io::RunConfig& c, const std::string& system_path, std::optional<double> a,
             std::optional<double> b, std::size_t samples) {
  double pa = 0.5, pb = 0.5;
  if (!system_path.empty()) {
    const auto f = build_jacobi(io::load_system(system_path).system);
    pa = f.a;
    pb = f.b;
  }
  if (a) pa = *a;
  if (b) pb = *b;
  const effpot::InteractionDecomposition dec(pa, pb);
  effpot::VeffOptions opt;
  opt.total_tol.rel = c.tol;
  Table t;
  t.columns = {"index", "stratum", "a", "b", "y_x", "y_y", "y_z", "R_x", "R_y", "R_z",
               "veff1", "error1", "envelope1", "residual1",
               "veff2", "error2", "envelope2", "residual2"};
  const auto pts = effpot::stratified_samples(samples, c.seed, pb);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& s = pts[i];
    const auto chk = effpot::veff_bound_check(dec, s.y, s.R, opt);
    t.rows.push_back({std::to_string(i), std::to_string(s.stratum), fmt(pa), fmt(pb),
                      fmt(s.y.x()), fmt(s.y.y()), fmt(s.y.z()), fmt(s.R.x()), fmt(s.R.y()),
                      fmt(s.R.z()), fmt(chk.value1), fmt(chk.error1), fmt(chk.envelope1),
                      fmt(chk.residual1), fmt(chk.value2), fmt(chk.error2), fmt(chk.envelope2),
                      fmt(chk.residual2)});
  }
  emit_table(c, "veff", t);
  return kOk;
}

int cmd_twocenter(const io::RunConfig& c, double A, double mu, const std::vector<double>& ds,
                  std::size_t widths) {
  twocenter::TwoCenterOptions opt;
  opt.widths_per_center = widths;
  Table t;
  t.columns = {"d", "energy", "basis_size", "retained", "condition"};
  for (double d : ds) {
    const auto r = twocenter::two_center_ground(A, mu, d, opt);
    t.rows.push_back({fmt(d), fmt(r.energy), std::to_string(r.basis_size),
                      std::to_string(r.retained), fmt(r.condition)});
  }
  emit_table(c, "twocenter", t);
  return kOk;
}

ecg::ProbeBudget budget_of(const io::RunConfig& c) {
  ecg::ProbeBudget b;
  b.basis = c.budget;
  b.pool = c.pool;
  b.seed = c.seed;
  b.condition_cap = c.condition_cap;
  return b;
}

int cmd_solve(const io::RunConfig& c, const std::string& system_path, const std::string& save,
              const std::string& load) {
  const auto sf = io::load_system(system_path);
  const ecg::ParticleSystem ps({sf.system.masses().begin(), sf.system.masses().end()},
                               {kCharges.begin(), kCharges.end()});
  std::vector<ecg::CorrelatedGaussian> initial;
  if (!load.empty()) {
    auto lb = io::basis_from_json(io::parse_json(io::read_text(load), load));
    if (lb.masses != ps.masses || lb.charges != ps.charges ||
        lb.coordinates != ecg::Coordinates::Chain) {
      throw io::InputError("loaded basis belongs to a different system");
    }
    initial = std::move(lb.elements);
  }
  const auto r = ecg::stability_probe(sf.system, budget_of(c), initial);
  json body;
  body["system"] = io::to_json(sf);
  body["frame"] = frame_json(r.verdict.frame);
  body["ratio"] = io::number(r.verdict.ratio);
  body["verdict"] = to_string(r.verdict.classification);
  body["e0"] = io::number(r.e0);
  body["threshold"] = io::number(r.threshold);
  body["eps_cert"] = io::number(r.eps_cert);
  body["certified_bound"] = r.certified_bound;
  body["margin"] = io::number(r.margin);
  body["basis_size"] = r.spectrum.basis_size;
  body["condition"] = io::number(r.spectrum.condition);
  json trace = json::array();
  for (double e : r.trace) trace.push_back(io::number(e));
  body["trace"] = trace;
  body["warnings"] = r.warnings;
  if (!save.empty()) {
    ecg::SvmOptions opt;
    opt.seed = c.seed;
    opt.pool = c.pool;
    opt.condition_cap = c.condition_cap;
    std::ofstream os(save, std::ios::binary);
    if (!os) throw io::InputError("cannot write " + save);
    os << io::basis_to_json(ps, opt, r.basis, r.trace, r.e0).dump(1) << '\n';
  }
  emit_report(c, "solve", body);
  return kOk;
}

std::vector<ecg::GridPoint> parse_grid(const std::string& text, ecg::Family family) {
  std::vector<ecg::GridPoint> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ecg::GridPoint p;
    const auto colon = item.find(':');
    if (family == ecg::Family::TwoMasses) {
      if (colon == std::string::npos) throw io::InputError("two_masses grid entries are m1:m3");
      p.m1 = parse_mass(item.substr(0, colon));
      p.m3 = parse_mass(item.substr(colon + 1));
    } else {
      p.m1 = parse_mass(item);
    }
    grid.push_back(p);
  }
  if (grid.empty()) throw io::InputError("empty grid");
  return grid;
}

int cmd_map(const io::RunConfig& c, const std::string& family_name, const std::string& grid_text,
            bool solve) {
  ecg::Family family;
  if (family_name == "equal_pairs") {
    family = ecg::Family::EqualPairs;
  } else if (family_name == "two_masses") {
    family = ecg::Family::TwoMasses;
  } else {
    throw io::InputError("family must be equal_pairs or two_masses");
  }
  const auto rows = ecg::mass_ratio_scan(family, parse_grid(grid_text, family), budget_of(c), solve);
  Table t;
  t.columns = {"m1", "m3", "ratio", "verdict", "e0", "threshold", "certified_bound", "margin",
               "basis_size", "error"};
  for (const auto& r : rows) {
    std::vector<std::string> cells{fmt(r.point.m1),
                                   family == ecg::Family::TwoMasses ? fmt(r.point.m3) : fmt(1.0),
                                   fmt(r.ratio),
                                   r.verdict ? to_string(*r.verdict) : ""};
    if (r.probe) {
      cells.insert(cells.end(), {fmt(r.probe->e0), fmt(r.probe->threshold),
                                 r.probe->certified_bound ? "true" : "false", fmt(r.probe->margin),
                                 std::to_string(r.probe->spectrum.basis_size)});
    } else {
      cells.insert(cells.end(), {"", "", "", "", ""});
    }
    cells.push_back(r.error);
    t.rows.push_back(std::move(cells));
  }
  emit_table(c, "map", t);
  return kOk;
}

int fail(const std::string& kind, const std::string& message, int code) {
  json err = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-body Coulomb stability criterion and verification tools"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path,
                 std::string("JSON run configuration (default: $") + io::kConfigEnv + ")");
  app.add_option("--seed", g.seed, "random seed (default 42)");
  app.add_option("--tol", g.tol, "relative quadrature tolerance (default 1e-6)");
  app.add_option("--budget", g.budget, "solver basis size (default 200)");
  app.add_option("--pool", g.pool, "solver candidates per growth step (default 200)");
  app.add_option("--cap", g.cap, "overlap condition cap (default 1e12)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "output file (default stdout)");

  std::string system_path;
  auto* crit = app.add_subcommand("criterion", "verdict of the sufficient instability criterion");
  crit->add_option("--system", system_path, "system file")->required();

  std::optional<double> mu_r;
  std::size_t grid_points = 201, envelope_samples = 1000;
  auto* chain_cmd = app.add_subcommand("chain", "verify the inequality chain at one mu_R");
  auto* mu_opt = chain_cmd->add_option("--mu-r", mu_r, "canonical mu_R (mu_x = 2 frame)");
  auto* sys_opt = chain_cmd->add_option("--system", system_path, "system file");
  mu_opt->excludes(sys_opt);
  chain_cmd->add_option("--grid-points", grid_points, "points per axis of the (alpha, beta) grid");
  chain_cmd->add_option("--envelope-samples", envelope_samples, "random beta samples");

  std::optional<double> pa, pb;
  std::size_t samples = 100;
  auto* veff_cmd = app.add_subcommand("veff", "effective potentials against the 3/16 envelopes");
  veff_cmd->add_option("--system", system_path, "system file (sets a and b)");
  veff_cmd->add_option("--a", pa, "mass parameter a (default 0.5)");
  veff_cmd->add_option("--b", pb, "mass parameter b (default 0.5)");
  veff_cmd->add_option("--samples", samples, "number of stratified (y, R) samples");

  double A = 1.0, mu = 0.375;
  std::vector<double> ds{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::size_t widths = twocenter::TwoCenterOptions{}.widths_per_center;
  auto* tc_cmd = app.add_subcommand("twocenter", "two-center Coulomb ground energies E(d)");
  tc_cmd->add_option("--A", A, "center charge strength");
  tc_cmd->add_option("--mu-r", mu, "reduced mass");
  tc_cmd->add_option("--d", ds, "center separations")->delimiter(',');
  tc_cmd->add_option("--widths", widths, "Gaussian exponents per center");

  std::string save, load;
  auto* solve_cmd = app.add_subcommand("solve", "variational stability probe");
  solve_cmd->add_option("--system", system_path, "system file")->required();
  solve_cmd->add_option("--save-basis", save, "write the grown basis");
  solve_cmd->add_option("--load-basis", load, "start from a saved basis");

  std::string family = "equal_pairs", grid = "1,2,5,10,100,1836.152672";
  bool no_solve = false;
  auto* map_cmd = app.add_subcommand("map", "criterion and solver over a mass family");
  map_cmd->add_option("--family", family, "equal_pairs (m,m,1,1) or two_masses (m1,1,m3,1)");
  map_cmd->add_option("--grid", grid, "comma list of m, or m1:m3 for two_masses");
  map_cmd->add_flag("--no-solve", no_solve, "criterion only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kInput);
  }

  try {
    const auto cfg = resolve(g);
    if (*crit) return cmd_criterion(cfg, system_path);
    if (*chain_cmd) {
      if (!mu_r && system_path.empty()) throw io::InputError("chain needs --mu-r or --system");
      return cmd_chain(cfg, mu_r, system_path, grid_points, envelope_samples);
    }
    if (*veff_cmd) return cmd_veff(cfg, system_path, pa, pb, samples);
    if (*tc_cmd) return cmd_twocenter(cfg, A, mu, ds, widths);
    if (*solve_cmd) return cmd_solve(cfg, system_path, save, load);
    if (*map_cmd) return cmd_map(cfg, family, grid, !no_solve);
  } catch (const io::InputError& e) {
    return fail("input", e.what(), kInput);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), kInput);
  } catch (const InconsistencyError& e) {
    return fail("inconsistency", e.what(), kInconsistent);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), kNumerical);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kNumerical);
  }
  return kInput;
}
