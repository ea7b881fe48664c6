#include "sipmix/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/version.hpp"

namespace sipmix {
namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& cell, double& v) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

const char* zeta_mode_name(ZetaMode m) {
  switch (m) {
    case ZetaMode::Fixed: return "fixed";
    case ZetaMode::Hyperprior: return "hyperprior";
    case ZetaMode::Ratio: return "ratio";
  }
  return "fixed";
}

ZetaMode parse_zeta_mode(const std::string& s) {
  if (s == "fixed") return ZetaMode::Fixed;
  if (s == "hyperprior") return ZetaMode::Hyperprior;
  if (s == "ratio") return ZetaMode::Ratio;
  throw std::invalid_argument("zeta_mode must be fixed, hyperprior or ratio, got '" + s + "'");
}

json counter_json(const AcceptanceCounter& c) {
  return json{{"proposed", c.proposed}, {"accepted", c.accepted}, {"rate", c.rate()}};
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw IoError(path.string() + ": empty file");
  }
  const std::size_t dim = split_csv(line).size();
  std::vector<double> values;
  int row = 1;
  int n = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != dim) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " columns, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      double v;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw IoError(path.string() + ": non-numeric value '" + cells[c] + "' at row " +
                      std::to_string(row) + ", column " + std::to_string(c + 1));
      }
      values.push_back(v);
    }
    ++n;
  }
  Dataset d;
  d.y = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(dim));
  return d;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data,
                   const std::vector<std::string>& names) {
  if (!names.empty() && static_cast<int>(names.size()) != data.dim()) {
    throw std::invalid_argument("write_dataset: column name count differs from dimension");
  }
  auto out = open_out(path);
  for (int c = 0; c < data.dim(); ++c) {
    out << (c ? "," : "") << (names.empty() ? "y" + std::to_string(c + 1) : names[c]);
  }
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int c = 0; c < data.dim(); ++c) out << (c ? "," : "") << format_double(data.y(i, c));
    out << '\n';
  }
  finish(out, path);
}

void write_trace(const std::filesystem::path& path, const PosteriorTrace& trace) {
  auto out = open_out(path);
  for (const auto& s : trace.samples) {
    std::vector<int> alloc(s.alloc);
    for (int& a : alloc) ++a;
    json j{{"m", s.m}, {"m_a", s.m_a}, {"alloc", alloc}, {"gamma", s.gamma}, {"zeta", s.zeta}};
    if (s.weights) j["weights"] = *s.weights;
    out << j.dump() << '\n';
  }
  finish(out, path);
}

PosteriorTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  PosteriorTrace trace;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      TraceSample s;
      s.m = j.at("m").get<int>();
      s.m_a = j.at("m_a").get<int>();
      s.alloc = j.at("alloc").get<std::vector<int>>();
      for (int& a : s.alloc) --a;
      s.gamma = j.at("gamma").get<double>();
      s.zeta = j.at("zeta").get<double>();
      if (j.contains("weights")) s.weights = j.at("weights").get<std::vector<double>>();
      trace.samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw IoError(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    trace.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return trace;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> r;
    for (const auto& cell : split_csv(line)) {
      double v;
      if (!parse_double(cell, v)) {
        throw IoError(path.string() + ": non-numeric value at row " +
                      std::to_string(rows.size() + 1));
      }
      r.push_back(v);
    }
    if (!rows.empty() && r.size() != rows.front().size()) {
      throw IoError(path.string() + ": ragged matrix at row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(r));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void RunConfig::validate() const {
  if (chains < 1) throw std::invalid_argument("chains must be at least 1");
}

std::string config_to_json(const RunConfig& c) {
  const Hyperparams& h = c.hyperparams;
  json j;
  j["alpha0"] = h.alpha0;
  j["lambda"] = h.lambda;
  if (h.v0.size() > 0) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < h.v0.rows(); ++i) {
      std::vector<double> r(h.v0.cols());
      for (Eigen::Index k = 0; k < h.v0.cols(); ++k) r[k] = h.v0(i, k);
      rows.push_back(r);
    }
    j["v0"] = rows;
  } else {
    j["v0"] = nullptr;
  }
  j["nu0"] = h.nu0;
  j["gamma"] = h.gamma;
  j["gamma_mode"] = h.gamma_prior ? "hyperprior" : "fixed";
  const GammaHyper gp = h.gamma_prior.value_or(GammaHyper{});
  j["gamma_prior_shape"] = gp.shape;
  j["gamma_prior_rate"] = gp.rate;
  j["zeta_mode"] = zeta_mode_name(h.zeta_mode);
  j["zeta"] = h.zeta;
  j["zeta_prior_shape"] = h.zeta_prior.shape;
  j["zeta_prior_rate"] = h.zeta_prior.rate;
  j["rho"] = h.rho;
  j["q"] = h.q;
  j["step_mu"] = h.step_mu;
  j["step_gamma"] = h.step_gamma;
  j["adapt"] = h.adapt;
  j["covariance_update"] = h.covariance_update == CovarianceUpdate::Centered ? "centered" : "literal";
  j["initial_components"] = h.initial_components;
  j["burn_in"] = h.burn_in;
  j["thin"] = h.thin;
  j["n_samples"] = h.n_samples;
  j["seed"] = c.seed;
  j["chains"] = c.chains;
  j["record_weights"] = c.record_weights;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (j.contains("config")) j = j.at("config");
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");

  RunConfig c = base;
  Hyperparams& h = c.hyperparams;
  bool gamma_hyper = h.gamma_prior.has_value();
  GammaHyper gp = h.gamma_prior.value_or(GammaHyper{});
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "alpha0") h.alpha0 = v.get<double>();
      else if (key == "lambda") h.lambda = v.get<double>();
      else if (key == "v0") {
        if (v.is_null()) {
          h.v0.resize(0, 0);
        } else {
          const auto rows = v.get<std::vector<std::vector<double>>>();
          h.v0.resize(rows.size(), rows.size());
          for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != rows.size()) throw std::invalid_argument("config: v0 must be square");
            for (std::size_t k = 0; k < rows.size(); ++k) h.v0(r, k) = rows[r][k];
          }
        }
      } else if (key == "nu0") h.nu0 = v.get<double>();
      else if (key == "gamma") h.gamma = v.get<double>();
      else if (key == "gamma_mode") {
        const auto mode = v.get<std::string>();
        if (mode != "fixed" && mode != "hyperprior") {
          throw std::invalid_argument("config: gamma_mode must be fixed or hyperprior");
        }
        gamma_hyper = mode == "hyperprior";
      } else if (key == "gamma_prior_shape") gp.shape = v.get<double>();
      else if (key == "gamma_prior_rate") gp.rate = v.get<double>();
      else if (key == "zeta_mode") h.zeta_mode = parse_zeta_mode(v.get<std::string>());
      else if (key == "zeta") h.zeta = v.get<double>();
      else if (key == "zeta_prior_shape") h.zeta_prior.shape = v.get<double>();
      else if (key == "zeta_prior_rate") h.zeta_prior.rate = v.get<double>();
      else if (key == "rho") h.rho = v.get<double>();
      else if (key == "q") h.q = v.get<double>();
      else if (key == "step_mu") h.step_mu = v.get<double>();
      else if (key == "step_gamma") h.step_gamma = v.get<double>();
      else if (key == "adapt") h.adapt = v.get<bool>();
      else if (key == "covariance_update") {
        const auto mode = v.get<std::string>();
        if (mode == "centered") h.covariance_update = CovarianceUpdate::Centered;
        else if (mode == "literal") h.covariance_update = CovarianceUpdate::Literal;
        else throw std::invalid_argument("config: covariance_update must be centered or literal");
      } else if (key == "initial_components") h.initial_components = v.get<int>();
      else if (key == "burn_in") h.burn_in = v.get<int>();
      else if (key == "thin") h.thin = v.get<int>();
      else if (key == "n_samples") h.n_samples = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "chains") c.chains = v.get<int>();
      else if (key == "record_weights") c.record_weights = v.get<bool>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (gamma_hyper) h.gamma_prior = gp;
  else h.gamma_prior.reset();
  c.validate();
  return c;
}

RunConfig read_config(const std::filesystem::path& path, const RunConfig& base) {
  return config_from_json(read_text(path), base);
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  return seed ^ static_cast<std::uint64_t>(chain);
}

void write_manifest(const std::filesystem::path& path, const RunConfig& c,
                    const std::string& command) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["rng"] = std::string(Rng::kAlgorithm);
  j["seed"] = c.seed;
  j["chain_seed_rule"] = "seed xor chain index";
  j["config"] = json::parse(config_to_json(c));
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_summary(const std::filesystem::path& path, const RunSummary& s) {
  const auto& d = s.diagnostics;
  json j;
  j["acceptance"] = {{"means", counter_json(d.means)},   {"weights", counter_json(d.weights)},
                     {"gamma", counter_json(d.gamma)},   {"zeta", counter_json(d.zeta)},
                     {"birth", counter_json(d.birth)},   {"death", counter_json(d.death)}};
  j["n_samples"] = s.n_samples;
  j["ma_mean"] = s.ma_mean;
  j["ma_variance"] = s.ma_variance;
  json hist = json::object();
  for (std::size_t k = 0; k < s.ma_histogram.size(); ++k) {
    if (s.ma_histogram[k] > 0.0) hist[std::to_string(k)] = s.ma_histogram[k];
  }
  j["ma_histogram"] = hist;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace sipmix
