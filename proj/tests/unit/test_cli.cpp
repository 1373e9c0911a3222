#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "harmo/curvature.hpp"
#include "harmo/hgf_io.hpp"
#include "harmo/metric.hpp"

using namespace harmo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

const fs::path& workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("harmo_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string bin() {
  const char* b = std::getenv("HARMO_BIN");
  return b ? b : "harmo";
}

Run run_harmo(const std::string& args, const std::string& env = "") {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd =
      "cd '" + workdir().string() + "' && " + env + " '" + bin() + "' " + args + " 2>'" + err.string() + "'";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

fs::path at(const std::string& name) { return workdir() / name; }

}  // namespace

TEST_CASE("generate writes HGF-1 and a sidecar; flat is delta") {
  const Run r = run_harmo("generate --kind flat --dim 3 --nodes 9 -o flat.hgf");
  REQUIRE(r.code == 0);
  const TensorField f = read_hgf(at("flat.hgf").string());
  CHECK(f.grid().shape() == std::vector<int>{9, 9, 9});
  CHECK((f - MetricField::flat(f.grid()).components()).max_abs() == 0.0);
  const auto side = nlohmann::json::parse(slurp(at("flat.hgf.json")));
  CHECK(side["schema"] == "harmo-sidecar/1");
  CHECK(side["ground_truth"]["riemann"] == "zero");
  CHECK(side["hgf_header"].get<std::string>().find("rank=2,0") != std::string::npos);
}

TEST_CASE("pullback with eps = 0 is flat") {
  REQUIRE(run_harmo("generate --kind pullback --eps 0 --nodes 9 -o pb0.hgf").code == 0);
  const TensorField f = read_hgf(at("pb0.hgf").string());
  CHECK((f - MetricField::flat(f.grid()).components()).max_abs() <= 1e-15);
}

TEST_CASE("conformal sidecar Christoffel symbols match christoffel() at second order") {
  double e[2];
  const int nodes[2] = {17, 33};
  for (int s = 0; s < 2; ++s) {
    const std::string name = "conf" + std::to_string(nodes[s]) + ".hgf";
    REQUIRE(run_harmo("generate --kind conformal --eps 0.01 --nodes " + std::to_string(nodes[s]) + " -o " + name).code ==
            0);
    const MetricField g = MetricField::from_components(read_hgf(at(name).string()));
    const TensorField G = christoffel(g);
    const auto side = nlohmann::json::parse(slurp(at(name + ".json")));
    const std::vector<double> want = side["ground_truth"]["christoffel"]["values"].get<std::vector<double>>();
    REQUIRE(want.size() == g.grid().size() * 27);
    const NodeMask c = central_region(g.grid(), 0.5);
    e[s] = 0;
    for (std::size_t k = 0; k < g.grid().size(); ++k)
      if (c(k))
        for (int q = 0; q < 27; ++q) e[s] = std::max(e[s], std::abs(G(k, q) - want[k * 27 + q]));
  }
  MESSAGE("Christoffel vs sidecar " << e[0] << " -> " << e[1]);
  CHECK(e[1] > 0);
  CHECK(e[0] / e[1] >= 3.0);
}

TEST_CASE("generation is deterministic in the seed and rejects bad parameters") {
  REQUIRE(run_harmo("generate --kind graph-immersion --dim 2 --ambient 4 --eps 0.3 --seed 5 --nodes 9 -o g1.hgf").code == 0);
  REQUIRE(run_harmo("generate --kind graph-immersion --dim 2 --ambient 4 --eps 0.3 --seed 5 --nodes 9 -o g2.hgf").code == 0);
  REQUIRE(run_harmo("generate --kind graph-immersion --dim 2 --ambient 4 --eps 0.3 --seed 6 --nodes 9 -o g3.hgf").code == 0);
  CHECK(slurp(at("g1.hgf")) == slurp(at("g2.hgf")));
  CHECK(slurp(at("g1.hgf.json")) == slurp(at("g2.hgf.json")));
  CHECK(slurp(at("g1.hgf")) != slurp(at("g3.hgf")));
  CHECK(read_hgf(at("g1.hgf").string()).values() == 4);

  const Run bad = run_harmo("generate --kind pullback --eps 0.5 -o bad.hgf");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("generation") != std::string::npos);
  CHECK(run_harmo("generate --kind nothing -o bad.hgf").code == 2);
  CHECK(run_harmo("generate --kind sphere-cap --radius 1.2 -o bad.hgf").code == 2);
}

TEST_CASE("exit-status contract") {
  CHECK(run_harmo("").code == 2);
  CHECK(run_harmo("frobnicate").code == 2);
  CHECK(run_harmo("coords -i does-not-exist.hgf").code == 2);
  REQUIRE(run_harmo("generate --kind stereographic --scale 1 --nodes 9 -o sphere.hgf").code == 0);
  const Run r = run_harmo("coords -i sphere.hgf");
  CHECK(r.code == 3);
  CHECK(r.err.find("admission") != std::string::npos);
}

TEST_CASE("flat inputs pass the metric suites") {
  REQUIRE(run_harmo("generate --kind flat --nodes 9 -o flat9.hgf").code == 0);
  for (const char* s : {"curvature-symmetries", "cross-formula", "lorentz", "pipeline"}) {
    const Run r = run_harmo(std::string("verify --suite ") + s + " -i flat9.hgf --json " + s + ".json");
    CHECK_MESSAGE(r.code == 0, s << "\n" << r.out);
    const auto j = nlohmann::json::parse(slurp(at(std::string(s) + ".json")));
    CHECK(j["passed"].get<bool>());
    CHECK(j["suite"] == s);
  }
  REQUIRE(run_harmo("generate --kind graph-immersion --eps 0 --nodes 9 -o plane.hgf").code == 0);
  CHECK(run_harmo("verify --suite immersion -i plane.hgf").code == 0);
}

TEST_CASE("asymmetric metric file fails with a symmetry diagnostic") {
  REQUIRE(run_harmo("generate --kind flat --nodes 9 -o sym.hgf").code == 0);
  TensorField f = read_hgf(at("sym.hgf").string());
  for (std::size_t k = 0; k < f.nodes(); ++k) f(k, 1) += 1e-3;  // g_01 only
  write_hgf(at("asym.hgf").string(), f);
  const Run v = run_harmo("verify --suite curvature-symmetries -i asym.hgf");
  CHECK(v.code == 1);
  CHECK(v.out.find("asymmetric metric") != std::string::npos);
  const Run c = run_harmo("curvature -i asym.hgf");
  CHECK(c.code == 2);
  CHECK(c.err.find("symmetry") != std::string::npos);
}

TEST_CASE("curvature, gauge and coords reports") {
  REQUIRE(run_harmo("generate --kind conformal --eps 0.002 --nodes 9 -o small.hgf").code == 0);
  const Run c = run_harmo("curvature -i small.hgf");
  REQUIRE(c.code == 0);
  const auto cj = nlohmann::json::parse(c.out);
  CHECK(cj["riemann_sup"].get<double>() > 0);
  CHECK(cj["symmetry_central"]["antisym_ij"].get<double>() == 0.0);

  const Run g = run_harmo("gauge -i small.hgf -o W.hgf --steps 5");
  REQUIRE(g.code == 0);
  const auto gj = nlohmann::json::parse(g.out);
  CHECK(gj["relax"]["objective_final"].get<double>() <= gj["objective_initial"].get<double>());
  CHECK(fs::exists(at("W.hgf")));

  const Run z = run_harmo("coords -i small.hgf --admission 10 -o z.hgf --report z.json");
  REQUIRE(z.code == 0);
  const auto zj = nlohmann::json::parse(slurp(at("z.json")));
  CHECK(zj["harmonic"]["defect"].get<double>() <= 1e-6);
  CHECK(read_hgf(at("z.hgf").string()).values() == 3);
}

TEST_CASE("immersion verbs") {
  REQUIRE(run_harmo("generate --kind sphere-cap --dim 3 --ambient 4 --radius 8 --nodes 17 -o cap.hgf").code == 0);
  const auto side = nlohmann::json::parse(slurp(at("cap.hgf.json")));
  CHECK(side["boundary_graph_data"]["eps"].get<double>() > 0);

  const Run a = run_harmo("immersion analyze -i cap.hgf");
  REQUIRE(a.code == 0);
  const auto aj = nlohmann::json::parse(a.out);
  CHECK(aj["mean_curvature_sup_interior"].get<double>() == doctest::Approx(1 / 8.0).epsilon(1e-2));
  CHECK(aj["energy"].is_null());

  const Run e = run_harmo("immersion extend -i cap.hgf --sphere-nodes 8 -o psi.hgf --box-nodes 13");
  REQUIRE(e.code == 0);
  const auto ej = nlohmann::json::parse(e.out);
  CHECK(ej["flat_defect"].get<double>() == 0.0);
  CHECK(ej["junction"]["value"].get<double>() < 1e-12);
  const TensorField psi = read_hgf(at("psi.hgf").string());
  CHECK(psi.grid().shape()[0] == 13);
  CHECK(!psi.grid().periodic(0));
  CHECK(psi.values() == 4);
  // corner node lies beyond the annulus: exactly q + rho (x, 0)
  const double rho = ej["rho"].get<double>();
  CHECK(psi(0, 0) == doctest::Approx(rho * psi.grid().coord(0, 0)).epsilon(1e-12));

  const Run s = run_harmo("immersion check-sobolev -i cap.hgf");
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out)["holds"].get<bool>());

  REQUIRE(run_harmo("generate --kind sphere-cap --radius 2 --nodes 9 -o bigcap.hgf").code == 0);
  const Run h = run_harmo("immersion extend -i bigcap.hgf --sphere-nodes 8");
  CHECK(h.code == 3);
  CHECK(h.err.find("hypothesis") != std::string::npos);
  CHECK(run_harmo("immersion analyze -i flat.hgf").code == 2);
}

TEST_CASE("flat sweep has vanishing ratios and is independent of the worker count") {
  const Run a = run_harmo("sweep --study flat --eps 0.001,0.01 --nodes 9 -o a.csv --summary a.json", "HARMO_WORKERS=1");
  const Run b = run_harmo("sweep --study flat --eps 0.001,0.01 --nodes 9 -o b.csv --summary b.json", "HARMO_WORKERS=4");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(at("a.csv")) == slurp(at("b.csv")));
  std::istringstream csv(slurp(at("a.csv")));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.rfind("schema,study,index,eps,", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.rfind("harmo-sweep/1,flat,", 0) == 0);
    CHECK(line.substr(line.size() - 3) == ",ok");
  }
  CHECK(rows == 2);
  const auto s = nlohmann::json::parse(slurp(at("a.json")));
  CHECK(s["c_emp_max"].get<double>() == 0.0);
  CHECK(s["failed"].get<int>() == 0);
}

TEST_CASE("sweep records aborted instances as rows") {
  const Run r = run_harmo("sweep --study conformal --eps 0.0001,1.0 --nodes 9 --summary s.json");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("admission-exceeded@admission") != std::string::npos);
  const auto s = nlohmann::json::parse(slurp(at("s.json")));
  CHECK(s["instances"].get<int>() == 2);
  CHECK(s["failed"].get<int>() == 1);
  CHECK(run_harmo("sweep --study conformal --eps 0.01 --solver-tol -1").code == 2);
}
