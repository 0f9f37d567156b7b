#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mdimkit/commands.hpp"
#include "mdimkit/config.hpp"
#include "mdimkit/infotheory.hpp"
#include "mdimkit/serialize.hpp"

using namespace mdk;
namespace fs = std::filesystem;

namespace {

ExperimentConfig resolve(const std::string& text) { return resolve_config(parse_config_text(text, "test.cfg")); }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data lines of a CSV (skipping the provenance line and the header), split
// on commas.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(read(p));
  std::string line;
  int k = 0;
  while (std::getline(in, line)) {
    if (k++ < 2) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mdimkit_test_" + name);
  fs::remove_all(p);
  return p;
}

template <class F>
ConfigError config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("", 0, "", "");
}

}  // namespace

TEST_CASE("parsing") {
  const ExperimentConfig c = resolve(
      "# comment\n"
      "name = demo\n"
      "group = Z2\n"
      "alphabet = grid:4\n"
      "eps_grid = [0.5, 0.25]\n"
      "n_range = 2..3\n"
      "distortion = Lp\n"
      "p = 4\n"
      "seed = 9\n"
      "rd.max_inner = 500\n");
  CHECK(c.name == "demo");
  CHECK(c.group()->lattice_rank() == 2);
  CHECK(c.model_alphabet().size() == 5);
  CHECK(c.eps_grid == std::vector<double>{0.5, 0.25});
  CHECK(c.n_min == 2);
  CHECK(c.n_max == 3);
  CHECK(c.distortion == DistortionKind::Lp);
  CHECK(c.p == 4.0);
  CHECK(c.seed == 9);
  CHECK(c.rd.max_inner == 500);
  CHECK(c.hash().size() == 16);
  CHECK(c.line_of("seed") == 9);
}

TEST_CASE("errors name the line and field") {
  auto dup = config_error([] { resolve("alphabet = hamming:2\nseed = 1\nseed = 2\n"); });
  CHECK(dup.line() == 3);
  CHECK(dup.field() == "seed");

  auto unknown = config_error([] { resolve("alphabet = hamming:2\nsede = 1\n"); });
  CHECK(unknown.line() == 2);
  CHECK(unknown.field() == "sede");

  auto empty = config_error([] { resolve("eps_grid = []\n"); });
  CHECK(empty.field() == "eps_grid");
  CHECK(empty.line() == 1);

  auto metric = config_error([] {
    resolve("alphabet = custom\nlabels = a, b, c\nmetric = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]\n");
  });
  CHECK(metric.field() == "metric");
  CHECK(metric.line() == 3);
  CHECK(std::string(metric.what()).find("test.cfg:3") != std::string::npos);

  CHECK(config_error([] { resolve("group = Q\n"); }).field() == "group");
  CHECK(config_error([] { resolve("n_range = 3..1\n"); }).field() == "n_range");
  CHECK(config_error([] { resolve("alpha_grid = 0.1, 0.2\n"); }).field() == "alpha_grid");
  CHECK(config_error([] { resolve("p = 0.5\n"); }).field() == "p");
  CHECK(config_error([] { resolve("site = [0.5, 0.6]\n"); }).field() == "site");
  CHECK(config_error([] { resolve("no equals sign\n"); }).line() == 1);
  CHECK(config_error([] { resolve("seed = x\n"); }).field() == "seed");
  CHECK(config_error([] { resolve("eps_grid = [0.1, \n"); }).field() == "eps_grid");

  // Commands that need an eps grid refuse configs without one.
  const ExperimentConfig no_eps = resolve("name = x\n");
  CHECK(config_error([&] { cmd_mdim(no_eps, scratch("noeps"), std::cerr); }).field() == "eps_grid");
}

TEST_CASE("custom alphabets") {
  const ExperimentConfig c = resolve("alphabet = custom\nlabels = lo, hi\nmetric = [0, 2, 2, 0]\n");
  CHECK(c.model_alphabet().labels() == std::vector<std::string>{"lo", "hi"});
  CHECK(c.model_alphabet().d(0, 1) == 2.0);
}

TEST_CASE("hash and overrides") {
  ExperimentConfig a = resolve("alphabet = hamming:2\nseed = 1\n");
  ExperimentConfig b = resolve("seed = 1\nalphabet = hamming:2\n");
  CHECK(a.hash() == b.hash());
  const std::string before = a.hash();
  apply_overrides(a, Overrides{std::nullopt, std::nullopt, 4});
  CHECK(a.jobs == 4);
  CHECK(a.hash() == before);
  apply_overrides(a, Overrides{5, std::nullopt, std::nullopt});
  CHECK(a.seed == 5);
  CHECK(a.hash() != before);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("stock configs on disk match the embedded copies") {
  for (const auto& s : stock_configs()) {
    INFO(s.file);
    CHECK(read(fs::path(MDK_CONFIG_DIR) / s.file) == s.text);
    CHECK_NOTHROW(resolve_config(parse_config_text(s.text, s.file)));
  }
}

TEST_CASE("mdim command writes log 2 for the binary shift") {
  const fs::path dir = scratch("mdim");
  const ExperimentConfig c = resolve("name = bin\nalphabet = hamming:2\neps_grid = 0.1, 0.4\nn_range = 1..4\n");
  const CommandOutput out = cmd_mdim(c, dir, std::cerr);
  CHECK(out.status == 0);
  const auto rows = csv_rows(dir / "bin.mdim.csv");
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(std::stod(r[8]) == doctest::Approx(std::log(2.0)).epsilon(1e-11));
  }
  const std::string text = read(dir / "bin.mdim.csv");
  CHECK(text.rfind("# mdimkit " + std::string(kToolkitVersion) + " config=" + c.hash() + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto j = nlohmann::json::parse(read(dir / "bin.mdim.json"));
  CHECK(j["config_hash"] == c.hash());
  CHECK(j["version"] == kToolkitVersion);
}

TEST_CASE("rd command") {
  const fs::path dir = scratch("rd");
  const ExperimentConfig c = resolve(
      "name = bern\nalphabet = hamming:2\nmeasure = product\nsite = [0.5, 0.5]\n"
      "eps_grid = 0.1, 0.2\nn_range = 1..2\n");
  cmd_rd(c, dir, std::cerr);
  const auto rows = csv_rows(dir / "bern.rd.csv");
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    const double eps = std::stod(r[0]);
    CHECK(std::abs(std::stod(r[2]) - (std::log(2.0) - binary_entropy(eps * (1 - 1e-9)))) <= 1e-6);
    CHECK(r[8] == "ok");
  }

  // Over budget: flagged rows instead of values.
  const ExperimentConfig tight = resolve(
      "name = tight\nalphabet = grid:8\neps_grid = 0.2\nn_range = 1..3\nbudget_cells = 2000\n");
  cmd_rd(tight, dir, std::cerr);
  const auto trows = csv_rows(dir / "tight.rd.csv");
  REQUIRE(trows.size() == 3);
  CHECK(trows[0][8] == "ok");
  CHECK(trows[2][8] == "budget_exceeded");
  CHECK(trows[2][2] == "nan");

  // Alpha-indexed rows.
  const ExperimentConfig linf = resolve(
      "name = linf\nalphabet = grid:4\ndistortion = Linf\neps_grid = 0.3\nalpha_grid = 0.2, 0.1, 0.05\n");
  cmd_rd(linf, dir, std::cerr);
  const auto lrows = csv_rows(dir / "linf.rd.csv");
  REQUIRE(lrows.size() == 3);
  CHECK(lrows[0][6] == "0.2");
  CHECK(lrows[1][6] == "0.1");
  CHECK(lrows[2][6] == "0.05");
  CHECK(std::stod(lrows[2][2]) >= std::stod(lrows[0][2]));
}

TEST_CASE("tiling command") {
  const fs::path dir = scratch("tiling");
  const ExperimentConfig even = resolve("name = even\ntiling_window = [[0], [12]]\ntile_side = 4\n");
  CHECK(cmd_tiling(even, dir, std::cerr).status == 0);
  const auto j = nlohmann::json::parse(read(dir / "even.tiling.json"));
  CHECK(j["validation"]["remainder_fraction"] == 0.0);
  CHECK(j["tiling"]["centers"][0].size() == 3);

  const ExperimentConfig odd = resolve("name = odd\ntiling_window = [[0], [10]]\ntile_side = 4\n");
  CHECK(cmd_tiling(odd, dir, std::cerr).status == 0);
  const auto jo = nlohmann::json::parse(read(dir / "odd.tiling.json"));
  CHECK(jo["validation"]["remainder_fraction"].get<double>() == doctest::Approx(0.2));
  CHECK(jo["report"]["total_density"].get<double>() == doctest::Approx(0.8));

  const ExperimentConfig bad = resolve(
      "name = bad\ntiling = explicit\ntiling_window = [[0], [8]]\n"
      "tiling_shapes = [[[0], [1], [2], [3]]]\ntiling_centers = [[[0], [2]]]\n");
  std::ostringstream log;
  CHECK(cmd_tiling(bad, dir, log).status == 1);
  CHECK(log.str().find("overlapping_tiles") != std::string::npos);
  const auto jb = nlohmann::json::parse(read(dir / "bad.tiling.json"));
  CHECK_FALSE(jb["validation"]["valid"].get<bool>());
  CHECK(jb["validation"]["issues"].size() >= 1);
}

TEST_CASE("verify-vp exit status") {
  const fs::path dir = scratch("vp");
  const ExperimentConfig ok = resolve("name = ok\nalphabet = hamming:2\neps_grid = 0.1\nfamilies = uniform\n");
  const CommandOutput good = cmd_verify_vp(ok, dir, std::cerr);
  CHECK(good.status == 0);
  REQUIRE(good.report);
  const auto j = nlohmann::json::parse(read(dir / "ok.vp.json"));
  for (const char* key : {"eps", "n", "S_lower", "S_upper", "Stilde_lower", "Stilde_upper", "best_rate", "family",
                          "ratios"}) {
    CHECK(j["report"]["rows"][0].contains(key));
  }
  const ExperimentConfig tampered =
      resolve("name = tampered\nalphabet = hamming:2\neps_grid = 0.1\nfamilies = uniform\nslack = -1\n");
  CHECK(cmd_verify_vp(tampered, dir, std::cerr).status == 1);
}

TEST_CASE("reruns produce identical bytes") {
  const ExperimentConfig c = resolve(
      "name = det\nalphabet = grid:3\neps_grid = 0.3, 0.6\nn_range = 1..2\n"
      "families = point_mass, uniform, dirichlet, empirical\nseed = 3\n");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const CommandOutput oa = cmd_verify_vp(c, a, std::cerr);
  ExperimentConfig c2 = c;
  c2.jobs = 2;
  const CommandOutput ob = cmd_verify_vp(c2, b, std::cerr);
  REQUIRE(oa.files.size() == ob.files.size());
  for (std::size_t i = 0; i < oa.files.size(); ++i) CHECK(read(oa.files[i]) == read(ob.files[i]));
}

TEST_CASE("csv writer") {
  CsvWriter w("1.0", "abc", {"x", "label"});
  w.cell(0.1).cell("a,b");
  w.end_row();
  CHECK(w.str() == "# mdimkit 1.0 config=abc\nx,label\n0.1,\"a,b\"\n");
  CHECK_THROWS_AS(w.end_row(), std::logic_error);
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
}
