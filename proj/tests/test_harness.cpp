#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "cfie/config.hpp"
#include "cfie/errors.hpp"
#include "cfie/experiment.hpp"
#include "cfie/matrix_io.hpp"
#include "support.hpp"

using namespace cfie;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cfie_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig c = parse_config("geometry = cube\nside = 1.0\nf = 1e6\n");
  CHECK(c.geometry == "cube");
  CHECK(c.side == 1.0);
  CHECK(c.f == std::vector<double>{1e6});
  CHECK(c.alpha == 0.5);
  CHECK(c.tol == 1e-6);
  REQUIRE(c.schemes.size() == 1);
  CHECK(c.schemes[0] == SchemeDescriptor{Equation::cfie, SchemeId::projector});
  CHECK(c.experiment == ExperimentKind::solve);
}

TEST_CASE("config errors") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("geometry = cube\nf = 1e6\ntol = 2.0\n").find("tol") != std::string::npos);
  const std::string unknown = message("geometry = cube\n\nfrobs = 3\nf = 1\n");
  CHECK(unknown.find("frobs") != std::string::npos);
  CHECK(unknown.find("line 3") != std::string::npos);
  CHECK(message("f = 1e6\n").find("geometry") != std::string::npos);
  CHECK(message("geometry = cube\n").find("frequency") != std::string::npos);
  CHECK_FALSE(message("geometry = cube\nf = -5\n").empty());
  CHECK_FALSE(message("geometry = cube\nf = 1e6\nschemes = cfie-wat\n").empty());
  CHECK_FALSE(message("geometry = cube\nf = 1e6\nalpha = 1\n").empty());
  CHECK_FALSE(message("geometry = off\nf = 1e6\n").empty());
  CHECK_FALSE(message("geometry = cube\nf = 1e6\nmax_iter = ten\n").empty());
  CHECK_FALSE(message("geometry cube\n").empty());
}

TEST_CASE("frequency lists") {
  CHECK(parse_frequency_list("1e2, 1e4,1e6") == std::vector<double>{1e2, 1e4, 1e6});
  const auto lin = parse_frequency_list("10:20:3");
  CHECK(lin == std::vector<double>{10, 15, 20});
  const auto lg = parse_frequency_list("1e2:1e6:3:log");
  REQUIRE(lg.size() == 3);
  CHECK(lg[1] == doctest::Approx(1e4));
  CHECK_THROWS(parse_frequency_list("1:2"));
  CHECK_THROWS(parse_frequency_list("0:2:3:log"));
}

TEST_CASE("property: config round trip") {
  ExperimentConfig c = parse_config(
      "geometry = cube  # trailing comment\nside = 0.7\nn = 2\nlevels = 0, 1, 2\nf = 1e2:1e6:5:log\n"
      "alpha = 0.3\nschemes = efie-loopstar, hloop, cfie-none\ndphi = jacobi+dyadic\ntol = 1e-8\nseed = 42\n"
      "restart = 30\nmax_iter = 77\nexperiment = refine\ntiming = false\ncond = off\nout = /tmp/x\n");
  CHECK(parse_config(serialize_config(c)) == c);
  for (const char* dphi : {"jacobi", "dyadic"}) {
    c.dphi = std::string(dphi) == "dyadic" ? DPhiMode::dyadic : DPhiMode::jacobi;
    c.compose_dyadic = false;
    CHECK(parse_config(serialize_config(c)) == c);
  }
  c.geometry = "off";
  c.off = "data/sphere_f124.off";
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("single solve writes one converged row") {
  ExperimentConfig c = parse_config("geometry = cube\nf = 1e6\nschemes = cfie-none\ntiming = false\n");
  c.out = scratch("single").string();
  const RunResult r = run_experiment(c);
  REQUIRE(r.table.rows.size() == 1);
  CHECK(r.table.rows[0].converged);
  CHECK(r.exit_code == 0);
  const std::string csv = read_text_file(fs::path(c.out) / "results.csv");
  CHECK(csv.rfind(SweepTable::csv_header() + "\n", 0) == 0);
  CHECK(fs::exists(fs::path(c.out) / "residuals" / "row_0000.csv"));
  const auto manifest = nlohmann::json::parse(read_text_file(fs::path(c.out) / "manifest.json"));
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["seed"] == 1);
  CHECK(parse_config(manifest["config"].get<std::string>()) == c);
  CHECK(manifest["rows"][0]["deviation_from_direct"].get<double>() <= 1e-5);
}

TEST_CASE("reruns are byte-identical") {
  ExperimentConfig c = parse_config(
      "geometry = cube\nf = 1e5, 1e6\nschemes = cfie-none, cfie-projector, efie-loopstar\ntiming = false\nseed = 9\n");
  c.out = scratch("rerun_a").string();
  run_experiment(c);
  const std::string a = read_text_file(fs::path(c.out) / "results.csv");
  const std::string ma = read_text_file(fs::path(c.out) / "manifest.json");
  c.out = scratch("rerun_b").string();
  run_experiment(c);
  CHECK(read_text_file(fs::path(c.out) / "results.csv") == a);
  const std::string mb = read_text_file(fs::path(c.out) / "manifest.json");
  // Manifests differ only in the echoed output directory.
  CHECK(nlohmann::json::parse(ma)["rows"] == nlohmann::json::parse(mb)["rows"]);
}

TEST_CASE("frequency experiment row count") {
  ExperimentConfig c = parse_config(
      "geometry = cube\nf = 1e2:1e6:3:log\nschemes = cfie-projector, efie-loopstar\nexperiment = freq\n");
  const RunResult r = run_experiment(c, false);
  CHECK(r.table.rows.size() == 3 * 3);
}

TEST_CASE("row failures give a partial exit code") {
  // h-loop on an unstructured OFF mesh fails; the rest of the run goes on.
  ExperimentConfig c = parse_config("geometry = off\noff = " + std::string(CFIE_DATA_DIR) +
                                    "/sphere_f124.off\nf = 1e6\nschemes = cfie-none, cfie-hloop\ncond = false\n");
  const RunResult r = run_experiment(c, false);
  REQUIRE(r.table.rows.size() == 2);
  CHECK(r.table.rows[0].converged);
  CHECK_FALSE(r.table.rows[1].converged);
  CHECK_FALSE(r.table.rows[1].error.empty());
  CHECK(r.exit_code == 2);
  CHECK(r.table.to_csv().find("cfie-hloop,nan,0,false") != std::string::npos);
}

TEST_CASE("OFF input must exist") {
  ExperimentConfig c = parse_config("geometry = off\noff = /nonexistent.off\nf = 1e6\n");
  CHECK_THROWS(run_experiment(c, false));
}

TEST_CASE("MatrixMarket round trips") {
  const SparseTransform l = loop_matrix(build_topology(generate_cube_mesh(1.0, 2)), false);
  const SparseMatrix back = read_matrix_market_real(to_matrix_market(l.matrix));
  CHECK((support::dense(back) - support::dense(l.matrix)).norm() == 0.0);

  const Eigen::MatrixXcd z = support::random_complex(7, 5, 2);
  CHECK((read_matrix_market_complex(to_matrix_market(z)) - z).norm() == 0.0);
  CHECK_THROWS_AS(read_matrix_market_real("nonsense"), ParseError);
  CHECK_THROWS_AS(read_matrix_market_real(to_matrix_market(z)), ParseError);
  CHECK_THROWS_AS(read_matrix_market_real("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
                  ParseError);

  const SparseTransform hs = hierarchical_star(dyadic_refine(generate_cube_mesh(1.0, 1), 1));
  const std::string sidecar = level_sidecar_csv(hs);
  CHECK(sidecar.rfind("column,level\n", 0) == 0);
  CHECK(std::count(sidecar.begin(), sidecar.end(), '\n') == hs.cols() + 1);
}

TEST_CASE("dense binary round trip") {
  const Eigen::MatrixXcd z = support::random_complex(4, 6, 5);
  const std::string bytes = to_dense_binary(z);
  CHECK(bytes.size() == 8 + 16 + 16 * 24);
  CHECK((read_dense_binary(bytes) - z).norm() == 0.0);
  CHECK_THROWS_AS(read_dense_binary(bytes.substr(0, 30)), ParseError);
  CHECK_THROWS_AS(read_dense_binary("XXXXXXXX" + bytes.substr(8)), ParseError);
}

TEST_CASE("residual history CSV") {
  CHECK(residual_csv({1.0, 0.5, 0.25}) == "iter,resid\n0,1\n1,0.5\n2,0.25\n");
}
