#pragma once

// File formats shared by the command-line tool and the tests.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fourbody/core.hpp"
#include "fourbody/ecg.hpp"
#include "fourbody/errors.hpp"

#ifndef FOURBODY_VERSION
#define FOURBODY_VERSION "0.0.0"
#endif

namespace fourbody::io {

using nlohmann::json;

inline constexpr const char* kVersion = FOURBODY_VERSION;
inline constexpr const char* kConfigEnv = "FOURBODY_CONFIG";

/// Thrown for unreadable or malformed input documents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x, int digits = 15) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// JSON number rounded to 15 significant digits; non-finite values become null.
inline json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format_double(x).c_str(), nullptr);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// System files
//
//   {"masses": ["1836.152672", "1", "1836.152672", "1"],
//    "labels": ["p", "e-", "pbar", "e+"],      (optional)
//    "unit": "electron masses"}                (optional)
//
// Masses follow the charge pattern (+, -, +, -). Numbers are accepted in
// place of strings but strings keep the decimal text exactly.

struct SystemFile {
  std::array<std::string, 4> mass_text;
  std::array<std::string, 4> labels;
  std::string unit;
  FourBodySystem system{{1.0, 1.0, 1.0, 1.0}};
};

inline SystemFile parse_system(const json& doc) {
  if (!doc.is_object()) throw InputError("system file must be a JSON object");
  if (!doc.contains("masses") || !doc["masses"].is_array()) {
    throw InputError("system file needs a \"masses\" array");
  }
  const auto& m = doc["masses"];
  if (m.size() != 4) {
    throw InputError("system file needs exactly four masses, got " + std::to_string(m.size()));
  }
  SystemFile f;
  std::array<double, 4> masses{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (m[i].is_string()) {
      f.mass_text[i] = m[i].get<std::string>();
    } else if (m[i].is_number()) {
      f.mass_text[i] = format_double(m[i].get<double>(), 17);
    } else {
      throw InputError("mass " + std::to_string(i + 1) + " must be a decimal string");
    }
    try {
      masses[i] = parse_mass(f.mass_text[i]);
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }
  if (doc.contains("labels")) {
    const auto& l = doc["labels"];
    if (!l.is_array() || l.size() != 4) throw InputError("\"labels\" must hold four strings");
    for (std::size_t i = 0; i < 4; ++i) {
      if (!l[i].is_string()) throw InputError("\"labels\" must hold four strings");
      f.labels[i] = l[i].get<std::string>();
    }
  }
  if (doc.contains("unit")) {
    if (!doc["unit"].is_string()) throw InputError("\"unit\" must be a string");
    f.unit = doc["unit"].get<std::string>();
  }
  f.system = FourBodySystem(masses, f.labels);
  return f;
}

inline SystemFile load_system(const std::string& path) {
  return parse_system(parse_json(read_text(path), path));
}

inline json to_json(const SystemFile& f) {
  json j;
  j["masses"] = f.mass_text;
  j["labels"] = f.labels;
  j["unit"] = f.unit;
  return j;
}

// ---------------------------------------------------------------------------
// Run configuration
//
// Defaults below; a JSON object with any subset of the keys can be given
// with --config or through FOURBODY_CONFIG, and flags override both.

enum class Format { Json, Csv };

inline const char* to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw InputError("format must be json or csv, got " + s);
}

struct RunConfig {
  std::uint64_t seed = 42;
  double tol = 1e-6;            ///< relative quadrature tolerance
  std::size_t budget = 200;     ///< basis size for solver runs
  std::size_t pool = 200;       ///< candidates per growth step
  double condition_cap = 1e12;
  std::optional<Format> format;  ///< unset: CSV for tables, JSON for reports
  std::string out;              ///< empty writes to stdout
};

inline void apply(RunConfig& c, const json& doc) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "budget") c.budget = v.get<std::size_t>();
      else if (key == "pool") c.pool = v.get<std::size_t>();
      else if (key == "condition_cap") c.condition_cap = v.get<double>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else if (key == "out") c.out = v.get<std::string>();
      else throw InputError("unknown config key " + key);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

inline void validate(const RunConfig& c) {
  if (!(c.tol > 0.0) || !(c.tol < 1.0)) throw InputError("tol must lie in (0, 1)");
  if (c.budget < 1) throw InputError("budget must be at least 1");
  if (c.pool < 1) throw InputError("pool must be at least 1");
  if (!(c.condition_cap > 1.0)) throw InputError("condition cap must exceed 1");
}

inline json to_json(const RunConfig& c) {
  return {{"seed", c.seed},          {"tol", number(c.tol)},
          {"budget", c.budget},      {"pool", c.pool},
          {"condition_cap", number(c.condition_cap)},
          {"format", c.format ? json(to_string(*c.format)) : json(nullptr)}, {"out", c.out}};
}

// ---------------------------------------------------------------------------
// Tables

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& names) { row(names); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << escape(cells[i]);
    }
    os_ << '\n';
  }

 private:
  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + '"';
  }

  std::ostream& os_;
};

// ---------------------------------------------------------------------------
// Correlated-Gaussian bases
//
// Matrices are stored row-major with 17 significant digits so a reload
// reproduces the basis bit for bit.

inline json basis_to_json(const ecg::ParticleSystem& sys, const ecg::SvmOptions& opt,
                          const std::vector<ecg::CorrelatedGaussian>& basis,
                          const std::vector<double>& trace, double e0) {
  json j;
  j["format"] = "fourbody-ecg-basis";
  j["version"] = kVersion;
  j["masses"] = sys.masses;
  j["charges"] = sys.charges;
  j["coordinates"] = opt.coordinates == ecg::Coordinates::Chain ? "chain" : "paired";
  j["seed"] = opt.seed;
  j["pool"] = opt.pool;
  j["condition_cap"] = opt.condition_cap;
  json elems = json::array();
  for (const auto& g : basis) {
    json A = json::array();
    for (Eigen::Index i = 0; i < g.A.rows(); ++i) {
      for (Eigen::Index k = 0; k < g.A.cols(); ++k) A.push_back(format_double(g.A(i, k), 17));
    }
    elems.push_back({{"seed", g.seed}, {"step", g.step}, {"A", A}});
  }
  j["elements"] = elems;
  j["trace"] = trace;
  j["e0"] = e0;
  return j;
}

struct LoadedBasis {
  std::vector<double> masses;
  std::vector<int> charges;
  ecg::Coordinates coordinates = ecg::Coordinates::Chain;
  std::vector<ecg::CorrelatedGaussian> elements;
  std::vector<double> trace;
};

inline LoadedBasis basis_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "fourbody-ecg-basis") {
      throw InputError("not a basis document");
    }
    LoadedBasis b;
    b.masses = j.at("masses").get<std::vector<double>>();
    b.charges = j.at("charges").get<std::vector<int>>();
    b.coordinates = j.at("coordinates").get<std::string>() == "paired" ? ecg::Coordinates::Paired
                                                                       : ecg::Coordinates::Chain;
    const auto n = static_cast<Eigen::Index>(b.masses.size()) - 1;
    for (const auto& e : j.at("elements")) {
      const auto& flat = e.at("A");
      if (static_cast<Eigen::Index>(flat.size()) != n * n) throw InputError("basis matrix has the wrong size");
      ecg::SmallMatrix A(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
          A(i, k) = std::strtod(flat[i * n + k].get<std::string>().c_str(), nullptr);
        }
      }
      b.elements.emplace_back(A, e.at("seed").get<std::uint64_t>(), e.at("step").get<int>());
    }
    if (j.contains("trace")) b.trace = j["trace"].get<std::vector<double>>();
    return b;
  } catch (const json::exception& e) {
    throw InputError(std::string("basis document: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(std::string("basis document: ") + e.what());
  }
}

}  // namespace fourbody::io
