#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "parasurf/cli/commands.hpp"
#include "support/common.hpp"

using namespace parasurf;
using testing_support::torus_grid;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

std::string cli_path() {
  const char* p = std::getenv("PARASURF_CLI");
  return p ? p : PARASURF_CLI;
}

fs::path source_dir() {
  const char* p = std::getenv("PARASURF_SOURCE_DIR");
  return p ? fs::path(p) : fs::path(PARASURF_SOURCE_DIR);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("parasurf_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args) {
  const std::string cmd = "env -u PARASURF_OUT " + cli_path() + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  auto p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

io::json read_json(const fs::path& p) { return io::json::parse(io::read_text(p)); }

std::string bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  cli::ExperimentConfig c;
  EXPECT_NO_THROW(cli::validate(c));
  EXPECT_TRUE(c.surface()->is_torus());
  EXPECT_TRUE(parse_terms(c.terms).empty());
}

TEST(Config, ParsesEverySection) {
  auto c = cli::parse_config(
      "[surface]\norigami = L3\nN = 16\nn_modes = 40\n"
      "[direction]\nxi1 = 1\nxi2 = 1.5\n"
      "[hamiltonian]\nterms = 1e-3*cos_base(1,-1)*fiber_poly(1,0); 2e-4*fiber_poly(0,1)\n"
      "[solver]\ncorrect = true\nmax_iter = 12\n"
      "[obstructions]\ns = 1, 2.5\n"
      "[sweep]\nepsilon = 1e-4, 1e-3\n"
      "[run]\nseed = 99\n");
  EXPECT_EQ(c.N, 16);
  EXPECT_EQ(c.n_modes, 40);
  EXPECT_EQ(c.surface()->n_squares(), 3);
  EXPECT_DOUBLE_EQ(c.xi2, 1.5);
  EXPECT_EQ(parse_terms(c.terms).size(), 2u);
  EXPECT_TRUE(c.correct);
  EXPECT_EQ(c.max_iter, 12);
  EXPECT_EQ(c.s_values, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(c.epsilons, (std::vector<double>{1e-4, 1e-3}));
  EXPECT_EQ(c.seed, 99u);
}

TEST(Config, NamedErrors) {
  auto message = [](const std::string& text) {
    try {
      cli::parse_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("[surface]\nN = 100\n").find("surface.N = 100"), std::string::npos);
  EXPECT_NE(message("[surface]\nresolution = 32\n").find("surface.resolution"), std::string::npos);
  EXPECT_NE(message("[solver]\ntol = fast\n").find("solver.tol"), std::string::npos);
  EXPECT_NE(message("[solver]\ncorrect = maybe\n").find("solver.correct"), std::string::npos);
  EXPECT_NE(message("[hamiltonian]\nterms = 1e-3*exp_base(1,0)\n").find("exp_base"), std::string::npos);
  EXPECT_NE(message("[checks]\nfd_step = 1e-2\n").find("fd_step"), std::string::npos);
  EXPECT_NE(message("[obstructions]\ns = 1, two\n").find("two"), std::string::npos);
}

TEST(Config, OrigamiPathIsRelativeToTheConfig) {
  auto dir = scratch("relpath");
  fs::create_directories(dir / "surfaces");
  std::ofstream(dir / "surfaces" / "L.origami") << "squares = 3\nh = 2 1 3\nv = 3 2 1\n";
  auto c = cli::load_config(write_config(dir, "[surface]\norigami = surfaces/L.origami\n").string());
  EXPECT_EQ(c.surface()->n_squares(), 3);
  EXPECT_EQ(c.surface()->cone_points().size(), 1u);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(source_dir() / "configs"))
    if (entry.path().extension() == ".ini") {
      SCOPED_TRACE(entry.path().string());
      EXPECT_NO_THROW(cli::load_config(entry.path().string()));
    }
}

TEST(Io, FieldRoundTrip) {
  auto d = torus_grid(16);
  Rng rng(5);
  Field f = random_field(d, 4, 1, 4, rng, true);
  auto dir = scratch("io");
  io::write_field(dir / "w", f, "w");
  Field g = io::read_field(dir / "w", d);
  EXPECT_EQ(g.rows(), 4);
  EXPECT_EQ(g.cols(), 1);
  EXPECT_EQ((f - g).sup(), 0.0);
  EXPECT_EQ(bytes(dir / "w.bin").size(), sizeof(double) * 4 * d->n_nodes());
  EXPECT_THROW(io::read_field(dir / "w", torus_grid(32)), Error);
  try {
    io::read_field(dir / "nothing", d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingArtifacts);
  }
}

TEST(Io, ScientificFormat) {
  EXPECT_EQ(cli::sci(0.0), "0.0e0");
  EXPECT_EQ(cli::sci(4.5e-13), "4.5e-13");
  EXPECT_EQ(cli::sci(-1234.0), "-1.2e3");
}

TEST(Cli, BadResolutionExitsWithConfigError) {
  auto dir = scratch("badN");
  auto cfg = write_config(dir, "[surface]\nN = 100\n");
  auto r = run("solve --config " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("ConfigError"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("surface.N"), std::string::npos) << r.output;
}

TEST(Cli, BadOrigamiExitsWithOne) {
  auto dir = scratch("badorigami");
  std::ofstream(dir / "bad.origami") << "squares = 2\nh = 1 1\nv = 2 1\n";
  auto cfg = write_config(dir, "[surface]\norigami = bad.origami\n");
  auto r = run("solve --config " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("NotAPermutation"), std::string::npos) << r.output;
}

TEST(Cli, LargePerturbationExitsWithTwo) {
  auto dir = scratch("large");
  auto cfg = write_config(dir, "[surface]\nN = 16\n[hamiltonian]\nterms = 2*cos_base(1,-1)*fiber_poly(1,0)\n");
  auto r = run("solve --config " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("SmallnessGateFailed"), std::string::npos) << r.output;
}

TEST(Cli, CheckIdentitiesPassOnTheTorus) {
  auto dir = scratch("checks");
  auto r = run("check-identities --config " + (source_dir() / "configs" / "checks_torus.ini").string() + " --out " +
               (dir / "out").string());
  EXPECT_EQ(r.code, 0) << r.output;
  auto j = read_json(dir / "out" / "result.json");
  EXPECT_TRUE(j.at("all_pass").get<bool>());
  EXPECT_GE(j.at("checks").size(), 8u);
}

TEST(Cli, FlatSolveIsExact) {
  auto dir = scratch("flat");
  auto r = run("solve --config " + (source_dir() / "configs" / "torus_flat.ini").string() + " --out " +
               (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.output;
  auto j = read_json(dir / "out" / "result.json");
  EXPECT_LE(j.at("residual").get<double>(), 1e-14);
  EXPECT_LE(j.at("P_norm").get<double>(), 1e-14);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_NE(r.output.find("residual     0.0e0"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("PASS"), std::string::npos);
  for (auto f : {"trace.csv", "fields/w.bin", "fields/w.json", "plots/residual.csv", "plots/conjugacy.csv"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;

  auto rep = run("report " + (dir / "out").string());
  EXPECT_EQ(rep.code, 0);
  EXPECT_NE(rep.output.find("PASS"), std::string::npos);
}

TEST(Cli, SolveIsDeterministic) {
  auto dir = scratch("determinism");
  auto cfg = write_config(dir,
                          "[surface]\nN = 32\n[hamiltonian]\nterms = 1e-3*cos_base(1,-1)*fiber_poly(1,0)\n"
                          "[conjugacy]\nn_points = 5\n[run]\nseed = 7\n");
  auto a = run("solve --config " + cfg.string() + " --out " + (dir / "a").string());
  auto b = run("solve --config " + cfg.string() + " --out " + (dir / "b").string());
  ASSERT_EQ(a.code, 0) << a.output;
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_EQ(bytes(dir / "a" / "result.json"), bytes(dir / "b" / "result.json"));
  EXPECT_EQ(bytes(dir / "a" / "fields" / "w.bin"), bytes(dir / "b" / "fields" / "w.bin"));
  EXPECT_EQ(bytes(dir / "a" / "trace.csv"), bytes(dir / "b" / "trace.csv"));
}

TEST(Cli, SweepOrderDoesNotDependOnWorkers) {
  auto dir = scratch("sweep");
  auto cfg = write_config(dir,
                          "[surface]\nN = 16\n[hamiltonian]\nterms = cos_base(1,-1)*fiber_poly(1,0); 0.5*fiber_poly(0,1)\n"
                          "[sweep]\nepsilon = 1e-4, 3e-4, 1e-3, 5\n");
  auto a = run("sweep --workers 1 --config " + cfg.string() + " --out " + (dir / "a").string());
  auto b = run("sweep --workers 3 --config " + cfg.string() + " --out " + (dir / "b").string());
  ASSERT_EQ(a.code, 0) << a.output;
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_EQ(bytes(dir / "a" / "result.json"), bytes(dir / "b" / "result.json"));
  auto rows = read_json(dir / "a" / "result.json").at("rows");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(rows[2].at("epsilon").get<double>(), 1e-3);
  // the obstruction of an unadjusted shear grows linearly with eps
  const double p0 = rows[0].at("P_norm").get<double>(), p2 = rows[2].at("P_norm").get<double>();
  EXPECT_NEAR(p2 / p0, 10.0, 0.05);
  EXPECT_EQ(rows[3].at("error").get<std::string>(), "SmallnessGateFailed");
}

TEST(Cli, OutEnvironmentOverride) {
  auto dir = scratch("env");
  const std::string cmd = "PARASURF_OUT=" + (dir / "env").string() + " " + cli_path() + " solve --out " +
                          (dir / "flag").string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "env" / "result.json"));
  EXPECT_FALSE(fs::exists(dir / "flag"));
}

TEST(Cli, ReportOnEmptyDirectory) {
  auto dir = scratch("empty");
  auto r = run("report " + dir.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("MissingArtifacts"), std::string::npos) << r.output;
}

TEST(Cli, CohomologicalEquation) {
  auto dir = scratch("ce");
  auto cfg = write_config(dir, "[surface]\nN = 32\n[ce]\nf = 0.5; cos_base(1,-1); 0.25*sin_base(2,1)\n");
  auto r = run("ce --config " + cfg.string() + " --out " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.output;
  auto j = read_json(dir / "out" / "result.json");
  EXPECT_LE(j.at("residual").get<double>(), 1e-12);
  EXPECT_NEAR(j.at("counterterms")[0][0].get<double>(), 0.5, 1e-14);
  // independent: u = sin(2 pi (x-y)) / (2 pi (xi1 - xi2)) - 0.25 cos(2 pi (2x+y)) / (2 pi (2 xi1 + xi2))
  auto d = torus_grid(32);
  const Direction xi = cli::ExperimentConfig{}.direction();
  Field u = io::read_field(dir / "out" / "fields" / "u", d);
  Vec ref = d->sample([&](const SurfacePoint& p) {
    return std::sin(2 * M_PI * (p.x - p.y)) / (2 * M_PI * (xi.xi1 - xi.xi2)) -
           0.25 * std::cos(2 * M_PI * (2 * p.x + p.y)) / (2 * M_PI * (2 * xi.xi1 + xi.xi2));
  });
  EXPECT_LE((u.data().row(0).transpose() - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cli, ObstructionsOnL3) {
  auto dir = scratch("obs");
  auto cfg = write_config(dir,
                          "[surface]\norigami = L3\nN = 16\nn_modes = 160\n"
                          "[obstructions]\ns = 1, 2\nn_candidates = 80\n");
  auto r = run("obstructions --config " + cfg.string() + " --out " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.output;
  auto rows = read_json(dir / "out" / "result.json").at("rows");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_GE(row.at("h").get<int>(), 1);
    EXPECT_GE(row.at("gap_ratio").get<double>(), 10.0);
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "plots" / "h_vs_s.csv"));
}
