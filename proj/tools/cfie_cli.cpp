// Command-line front end for the CFIE workbench.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cfie/assembly.hpp"
#include "cfie/basis.hpp"
#include "cfie/errors.hpp"
#include "cfie/experiment.hpp"
#include "cfie/matrix_io.hpp"

namespace {

constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

// Flags shared by the experiment subcommands. Unset flags leave the
// config value alone, so flags override a --config file.
struct Overrides {
  std::string config;
  std::string geometry;
  std::optional<double> side;
  std::optional<int> n;
  std::string levels;
  std::string f;
  std::optional<double> alpha;
  std::string schemes;
  std::string dphi;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> restart;
  std::optional<int> max_iter;
  std::optional<int> refine_peak;
  bool no_timing = false;
  bool no_cond = false;
};

void add_geometry_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("geometry", o.geometry, "'cube' or the path of an OFF file");
  cmd->add_option("--side", o.side, "cube side length in meters");
  cmd->add_option("--n", o.n, "cube subdivisions per side");
  cmd->add_option("--levels", o.levels, "dyadic refinement levels, comma separated");
}

void add_run_flags(CLI::App* cmd, Overrides& o) {
  add_geometry_flags(cmd, o);
  cmd->add_option("--config", o.config, "key = value config file");
  cmd->add_option("--f", o.f, "frequencies in Hz: a,b,c or lo:hi:count[:log]");
  cmd->add_option("--alpha", o.alpha, "CFIE combination parameter");
  cmd->add_option("--schemes", o.schemes, "comma separated, e.g. efie-none,cfie-projector");
  cmd->add_option("--dphi", o.dphi, "jacobi, dyadic or jacobi+dyadic");
  cmd->add_option("--tol", o.tol, "GMRES relative tolerance");
  cmd->add_option("--seed", o.seed, "power iteration seed");
  cmd->add_option("--restart", o.restart, "GMRES restart length, 0 for none");
  cmd->add_option("--max-iter", o.max_iter, "GMRES iteration cap");
  cmd->add_option("--refine-peak", o.refine_peak, "extra evaluations around the EFIE peak");
  cmd->add_flag("--no-timing", o.no_timing, "write wall_s as 0 for reproducible output");
  cmd->add_flag("--no-cond", o.no_cond, "skip dense condition numbers");
}

// Rebuilds key = value text so flag values go through the config parser.
cfie::ExperimentConfig resolve(const Overrides& o, const std::string& out, std::optional<cfie::ExperimentKind> kind) {
  std::string text;
  if (!o.config.empty()) {
    if (!std::filesystem::exists(o.config)) throw cfie::ParseError("config file not found: " + o.config);
    text = cfie::read_text_file(o.config);
  }
  std::string extra;
  auto put = [&](const char* key, const std::string& v) { extra += std::string(key) + " = " + v + "\n"; };
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (!o.geometry.empty()) {
    if (o.geometry == "cube") {
      put("geometry", "cube");
    } else {
      put("geometry", "off");
      put("off", o.geometry);
    }
  }
  if (o.side) put("side", num(*o.side));
  if (o.n) put("n", std::to_string(*o.n));
  if (!o.levels.empty()) put("levels", o.levels);
  if (!o.f.empty()) put("f", o.f);
  if (o.alpha) put("alpha", num(*o.alpha));
  if (!o.schemes.empty()) put("schemes", o.schemes);
  if (!o.dphi.empty()) put("dphi", o.dphi);
  if (o.tol) put("tol", num(*o.tol));
  if (o.seed) put("seed", std::to_string(*o.seed));
  if (o.restart) put("restart", std::to_string(*o.restart));
  if (o.max_iter) put("max_iter", std::to_string(*o.max_iter));
  if (o.refine_peak) put("refine_peak", std::to_string(*o.refine_peak));
  if (o.no_timing) put("timing", "false");
  if (o.no_cond) put("cond", "false");
  if (!out.empty()) put("out", out);
  if (kind) put("experiment", cfie::to_string(*kind));
  return cfie::parse_config(text + "\n" + extra);
}

int run(const Overrides& o, const std::string& out, std::optional<cfie::ExperimentKind> kind, bool quiet) {
  const cfie::ExperimentConfig config = resolve(o, out, kind);
  const cfie::RunResult result = cfie::run_experiment(config, true);
  if (!quiet) std::cout << result.table.to_csv(config.timing);
  for (const auto& row : result.table.rows) {
    if (!row.error.empty()) std::cerr << "row " << row.scheme << " f=" << row.f_hz << ": " << row.error << '\n';
  }
  return result.exit_code == 0 ? 0 : kExitPartial;
}

cfie::RefinementHierarchy geometry_hierarchy(const Overrides& o) {
  if (o.geometry.empty()) throw cfie::ParseError("missing geometry");
  const cfie::SurfaceMesh coarse = o.geometry == "cube" ? cfie::generate_cube_mesh(o.side.value_or(1.0), o.n.value_or(1))
                                                        : cfie::read_off_file(o.geometry);
  // Refine to the deepest requested level; the hierarchy holds the rest.
  int levels = 0;
  std::stringstream list(o.levels);
  for (std::string item; std::getline(list, item, ',');) {
    try {
      levels = std::max(levels, std::stoi(item));
    } catch (const std::logic_error&) {
      throw cfie::ParseError("--levels: not an integer: '" + item + "'");
    }
  }
  return cfie::dyadic_refine(coarse, levels);
}

int mesh_info(const Overrides& o) {
  const cfie::RefinementHierarchy h = geometry_hierarchy(o);
  std::cout << cfie::MeshStatistics::csv_header() << '\n';
  for (const auto& mesh : h.meshes) std::cout << cfie::mesh_statistics(mesh).csv_row() << '\n';
  return 0;
}

int assemble(const Overrides& o, const std::string& what, const std::string& format, const std::string& out,
             bool quiet) {
  const cfie::RefinementHierarchy h = geometry_hierarchy(o);
  const cfie::RwgBasis basis = cfie::rwg_space(h.fine(), h.fine_topology());
  const std::filesystem::path dir = out.empty() ? "." : out;
  std::filesystem::create_directories(dir);

  std::optional<cfie::SparseTransform> transform;
  if (what == "loops") transform = cfie::loop_matrix(basis.topology, false);
  if (what == "stars") transform = cfie::star_matrix(basis.topology, false);
  if (what == "hloops") transform = cfie::hierarchical_nodal_loops(h);
  if (what == "hstars") transform = cfie::hierarchical_star(h);
  if (transform) {
    cfie::write_text_file(dir / (what + ".mtx"), cfie::to_matrix_market(transform->matrix));
    if (transform->has_levels()) cfie::write_text_file(dir / (what + "_levels.csv"), cfie::level_sidecar_csv(*transform));
    if (!quiet) std::cout << "wrote " << (dir / (what + ".mtx")).string() << '\n';
    return 0;
  }

  Eigen::MatrixXcd m;
  if (what == "gram") {
    m = cfie::assemble_gram(basis).values;
  } else {
    if (o.f.empty()) throw cfie::ParseError("assemble " + what + " needs --f");
    const double f = cfie::parse_frequency_list(o.f).front();
    const double k = cfie::wavenumber(f);
    const cfie::OperatorSet ops = cfie::assemble_operators(basis, k, what != "ze");
    if (what == "ze") {
      m = cfie::efie_matrix(basis, ops).values;
    } else if (what == "zm") {
      m = cfie::mfie_matrix(ops).values;
    } else if (what == "zc") {
      m = cfie::combine_cfie(cfie::efie_matrix(basis, ops), cfie::mfie_matrix(ops), o.alpha.value_or(cfie::kDefaultAlpha),
                             1.0)
              .values;
    } else {
      throw cfie::ParseError("unknown operator '" + what + "'");
    }
  }
  const auto path = dir / (what + (format == "bin" ? ".bin" : ".mtx"));
  cfie::write_text_file(path, format == "bin" ? cfie::to_dense_binary(m) : cfie::to_matrix_market(m));
  if (!quiet) std::cout << "wrote " << path.string() << " (" << m.rows() << " x " << m.cols() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Helmholtz preconditioned CFIE workbench"};
  app.set_version_flag("--version", cfie::kVersion);
  app.require_subcommand(1);
  std::string out;
  bool quiet = false;
  app.add_option("--out", out, "output directory");
  app.add_flag("--quiet", quiet, "suppress tables on stdout");

  Overrides o;
  std::string what = "ze", format = "mtx";

  auto* info = app.add_subcommand("mesh-info", "print mesh statistics for every refinement level");
  add_geometry_flags(info, o);

  auto* asm_cmd = app.add_subcommand("assemble", "write an operator or transform to disk");
  add_geometry_flags(asm_cmd, o);
  asm_cmd->add_option("--op", what, "ze, zm, zc, gram, loops, stars, hloops or hstars")
      ->check(CLI::IsMember({"ze", "zm", "zc", "gram", "loops", "stars", "hloops", "hstars"}));
  asm_cmd->add_option("--format", format, "mtx or bin")->check(CLI::IsMember({"mtx", "bin"}));
  asm_cmd->add_option("--f", o.f, "frequency in Hz");
  asm_cmd->add_option("--alpha", o.alpha, "CFIE combination parameter");

  auto* solve = app.add_subcommand("solve", "solve every scheme at each frequency");
  auto* refine = app.add_subcommand("sweep-refine", "condition and iterations across refinement levels");
  auto* freq = app.add_subcommand("sweep-freq", "condition and iterations across frequencies");
  auto* reso = app.add_subcommand("sweep-resonance", "scan a window lo:hi:steps for interior resonances");
  auto* runc = app.add_subcommand("run", "run the experiment described by --config");
  for (auto* cmd : {solve, refine, freq, reso, runc}) {
    cmd->fallthrough();
    add_run_flags(cmd, o);
  }
  info->fallthrough();
  asm_cmd->fallthrough();
  runc->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*info) return mesh_info(o);
    if (*asm_cmd) return assemble(o, what, format, out, quiet);
    if (*solve) return run(o, out, cfie::ExperimentKind::solve, quiet);
    if (*refine) return run(o, out, cfie::ExperimentKind::refine, quiet);
    if (*freq) return run(o, out, cfie::ExperimentKind::freq, quiet);
    if (*reso) return run(o, out, cfie::ExperimentKind::resonance, quiet);
    if (*runc) return run(o, out, std::nullopt, quiet);
  } catch (const cfie::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const cfie::TopologyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const cfie::UnsupportedGeometry& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
