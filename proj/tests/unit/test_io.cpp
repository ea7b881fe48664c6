#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sipmix/io.hpp"
#include "sipmix/rng.hpp"

using namespace sipmix;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sipmix_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("reads a well formed CSV") {
    const auto p = scratch("ok.csv");
    write_file(p, "a,b\n1.5,2\n-3e-2, 4\n");
    const Dataset d = read_dataset(p);
    CHECK(d.n() == 2);
    CHECK(d.dim() == 2);
    CHECK(d.y(1, 0) == -3e-2);
    CHECK(d.y(1, 1) == 4.0);
  }

  TEST_CASE("names the row and column of a bad cell") {
    const auto p = scratch("bad.csv");
    write_file(p, "a,b\n1,2\n3,oops\n");
    try {
      read_dataset(p);
      FAIL("expected an error");
    } catch (const IoError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 3") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }

  TEST_CASE("rejects empty and ragged files") {
    const auto p = scratch("empty.csv");
    write_file(p, "");
    CHECK_THROWS_AS(read_dataset(p), IoError);
    write_file(p, "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_dataset(p), IoError);
    CHECK_THROWS_AS(read_dataset(scratch("missing.csv")), IoError);
  }

  TEST_CASE("dataset round trip") {
    Rng r(1);
    Dataset d;
    d.y.resize(40, 3);
    for (int i = 0; i < d.y.size(); ++i) d.y.data()[i] = r.normal() * 1e3 / 7.0;
    const auto p = scratch("round.csv");
    write_dataset(p, d);
    CHECK(read_dataset(p).y == d.y);
  }

  TEST_CASE("trace round trip is lossless") {
    Rng r(2);
    PosteriorTrace tr;
    for (int t = 0; t < 10; ++t) {
      TraceSample s;
      s.m = 4;
      for (int i = 0; i < 7; ++i) s.alloc.push_back(r.uniform_int(3));
      s.m_a = static_cast<int>(std::set<int>(s.alloc.begin(), s.alloc.end()).size());
      s.gamma = r.uniform() / 3.0;
      s.zeta = r.gamma(2.0);
      if (t % 2) s.weights = r.dirichlet(std::vector<double>(4, 1.0));
      tr.samples.push_back(s);
    }
    const auto p = scratch("trace.ndjson");
    write_trace(p, tr);
    CHECK(read_trace(p) == tr);
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    const auto j = nlohmann::json::parse(first);
    for (const char* key : {"m", "m_a", "alloc", "gamma", "zeta"}) CHECK(j.contains(key));
    for (int a : j["alloc"]) CHECK(a >= 1);
  }

  TEST_CASE("matrix CSV has N lines of N entries") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.5, 0.25, 0.5, 1, 1.0 / 3, 0.25, 1.0 / 3, 1;
    const auto p = scratch("psm.csv");
    write_matrix_csv(p, m);
    std::ifstream in(p);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      ++lines;
      CHECK(std::count(line.begin(), line.end(), ',') == 2);
    }
    CHECK(lines == 3);
    CHECK(read_matrix_csv(p) == m);
  }

  TEST_CASE("summary carries all six acceptance rates") {
    RunSummary s;
    s.diagnostics.birth.record(true);
    s.diagnostics.birth.record(false);
    s.ma_histogram = {0.0, 0.25, 0.75};
    const auto p = scratch("summary.json");
    write_summary(p, s);
    const auto j = nlohmann::json::parse(read_text(p));
    for (const char* key : {"means", "weights", "gamma", "zeta", "birth", "death"}) {
      CHECK(j["acceptance"].contains(key));
    }
    CHECK(j["acceptance"]["birth"]["rate"] == 0.5);
    CHECK(j["ma_histogram"]["2"] == 0.75);
  }

  TEST_CASE("config round trip and overrides") {
    RunConfig c;
    c.hyperparams.alpha0 = 2.5;
    c.hyperparams.gamma_prior = GammaHyper{3.0, 2.0};
    c.hyperparams.zeta_mode = ZetaMode::Ratio;
    c.hyperparams.rho = 5.0;
    c.hyperparams.v0 = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    c.hyperparams.covariance_update = CovarianceUpdate::Literal;
    c.seed = 99;
    c.chains = 3;
    const RunConfig back = config_from_json(config_to_json(c));
    CHECK(back.hyperparams.alpha0 == 2.5);
    CHECK(back.hyperparams.gamma_prior->shape == 3.0);
    CHECK(back.hyperparams.zeta_mode == ZetaMode::Ratio);
    CHECK(back.hyperparams.v0 == c.hyperparams.v0);
    CHECK(back.hyperparams.covariance_update == CovarianceUpdate::Literal);
    CHECK(back.seed == 99);
    CHECK(back.chains == 3);

    const RunConfig partial = config_from_json(R"({"lambda": 7})", c);
    CHECK(partial.hyperparams.lambda == 7.0);
    CHECK(partial.hyperparams.alpha0 == 2.5);
    CHECK_THROWS_AS(config_from_json(R"({"lamda": 7})"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(R"({"chains": 0})"), std::invalid_argument);
  }

  TEST_CASE("manifest records the generator and can be read back as a config") {
    RunConfig c;
    c.seed = 5;
    const auto p = scratch("manifest.json");
    write_manifest(p, c, "fit");
    const auto j = nlohmann::json::parse(read_text(p));
    CHECK(j["rng"] == std::string(Rng::kAlgorithm));
    CHECK(j["seed"] == 5);
    CHECK(read_config(p).seed == 5);
  }

  TEST_CASE("chain seeds") {
    CHECK(chain_seed(10, 0) == 10);
    CHECK(chain_seed(10, 3) == (10u ^ 3u));
  }
}
