#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("extalg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string("\"") + EXTALG_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string sample(const std::string& name) { return "\"" + (fs::path(EXTALG_SAMPLES_DIR) / name).string() + "\""; }

/// Coefficients of a product from the JSON table, keyed by 1-based index list.
Json product(const Json& table, const std::vector<int>& a, const std::vector<int>& b) {
  for (const auto& p : table["products"])
    if (p["a"].get<std::vector<int>>() == a && p["b"].get<std::vector<int>>() == b) return p["terms"];
  FAIL("product not in table");
  return {};
}

bool single_term(const Json& terms, const std::vector<int>& idx, double re) {
  return terms.size() == 1 && terms[0]["indices"].get<std::vector<int>>() == idx && terms[0]["re"].get<double>() == re &&
         terms[0]["im"].get<double>() == 0.0;
}

}  // namespace

TEST_CASE("mul-table", "[cli]") {
  SECTION("negative line metric gives the complex numbers") {
    const Run r = run("mul-table --metric " + sample("metric_negative_line.json"));
    REQUIRE(r.code == 0);
    const Json t = Json::parse(r.out);
    CHECK(t["dim"] == 1);
    CHECK(single_term(product(t, {1}, {1}), {}, -1.0));
    CHECK(single_term(product(t, {}, {1}), {1}, 1.0));
  }
  SECTION("quaternion relations") {
    const Run r = run("mul-table --metric " + sample("metric_quaternion.json"));
    REQUIRE(r.code == 0);
    const Json t = Json::parse(r.out);
    CHECK(single_term(product(t, {1}, {1}), {}, -1.0));
    CHECK(single_term(product(t, {2}, {2}), {}, -1.0));
    CHECK(single_term(product(t, {1, 2}, {1, 2}), {}, -1.0));
    CHECK(single_term(product(t, {1}, {2}), {1, 2}, 1.0));
    CHECK(single_term(product(t, {2}, {1}), {1, 2}, -1.0));
    CHECK(single_term(product(t, {2}, {1, 2}), {1}, 1.0));
    CHECK(single_term(product(t, {1, 2}, {1}), {2}, 1.0));
  }
  SECTION("diagonal metrics give identical tables in both bases") {
    const Run g = run("mul-table --metric " + sample("metric_diagonal3.json") + " --basis grassmann");
    const Run c = run("mul-table --metric " + sample("metric_diagonal3.json") + " --basis clifford");
    REQUIRE(g.code == 0);
    REQUIRE(c.code == 0);
    CHECK(Json::parse(g.out)["products"] == Json::parse(c.out)["products"]);
    const Run o1 = run("mul-table --metric " + sample("metric_oblique3.json") + " --basis grassmann");
    const Run o2 = run("mul-table --metric " + sample("metric_oblique3.json") + " --basis clifford");
    CHECK(Json::parse(o1.out)["products"] != Json::parse(o2.out)["products"]);
  }
  SECTION("csv output and --out") {
    const fs::path file = scratch() / "table.csv";
    const Run r = run("mul-table --metric " + sample("metric_quaternion.json") + " --format csv --out \"" +
                      file.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string csv = slurp(file);
    CHECK(csv.rfind("a,b,gamma,re,im\n", 0) == 0);
    CHECK(csv.find("e^1,e^1,e,-1,0\n") != std::string::npos);
  }
  SECTION("input errors") {
    const Run bad = run("mul-table --metric " + sample("metric_malformed.json"));
    CHECK(bad.code == 2);
    CHECK(bad.err.find("$.g_upper[0][1]") != std::string::npos);
    CHECK(run("mul-table --metric \"" + (scratch() / "missing.json").string() + "\"").code == 2);
    CHECK(run("mul-table").code == 2);
    CHECK(run("mul-table --metric " + sample("metric_quaternion.json") + " --basis other").code == 2);
  }
}

TEST_CASE("verify", "[cli]") {
  SECTION("algebra suite at the default seed") {
    const Run r = run("verify algebra --seed 7 --count 1000");
    CHECK(r.code == 0);
    CHECK(r.err.find("seed: 7") != std::string::npos);
    const Json rep = Json::parse(r.out);
    CHECK(rep["suite"] == "algebra");
    CHECK(rep["passed"] == true);
    CHECK(rep["count"] == 1000);
    CHECK_FALSE(rep.contains("wall_time"));
    for (const auto& c : rep["cases"]) {
      CHECK(c["status"] == "pass");
      CHECK(c["max_defect"].get<double>() < c["tolerance"].get<double>());
    }
  }
  SECTION("dirac suite") {
    const Run r = run("verify dirac");
    CHECK(r.code == 0);
    bool homomorphism = false;
    const Json rep = Json::parse(r.out);
    for (const auto& c : rep["cases"]) homomorphism |= c["id"] == "dirac.homomorphism" && c["status"] == "pass";
    CHECK(homomorphism);
  }
  SECTION("reports are byte-identical for a fixed seed and sorted by id") {
    const fs::path a = scratch() / "a.json", b = scratch() / "b.json";
    REQUIRE(run("verify spin --seed 11 --count 20 --out \"" + a.string() + "\"").code == 0);
    REQUIRE(run("verify --suite spin --seed 11 --count 20 --out \"" + b.string() + "\"").code == 0);
    CHECK(slurp(a) == slurp(b));
    const Json rep = Json::parse(slurp(a));
    std::vector<std::string> ids;
    for (const auto& c : rep["cases"]) ids.push_back(c["id"]);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    CHECK(rep["seed"] == 11);
  }
  SECTION("timing and csv") {
    const Run t = run("verify hodge --count 5 --timing");
    CHECK(t.code == 0);
    CHECK(Json::parse(t.out)["wall_time"].get<double>() >= 0.0);
    const Run c = run("verify hodge --count 5 --format csv");
    CHECK(c.out.rfind("suite,id,status,max_defect,tolerance\n", 0) == 0);
  }
  SECTION("usage errors") {
    CHECK(run("verify nonsense").code == 2);
    CHECK(run("verify").code == 2);
    CHECK(run("verify algebra --format xml").code == 2);
    CHECK(run("").code == 2);
    CHECK(run("--help").code == 0);
  }
}

TEST_CASE("field-check", "[cli]") {
  SECTION("flat Minkowski configuration passes") {
    const Run r = run("field-check --config " + sample("flat_minkowski.json"));
    CHECK(r.code == 0);
    const Json rep = Json::parse(r.out);
    CHECK(rep["passed"] == true);
    CHECK(rep["cases"].size() > 0);
    for (const auto& c : rep["cases"]) {
      CHECK(c["max_defect"].get<double>() < 1e-8);
      CHECK(c["point"].size() == 4);
    }
  }
  SECTION("zero configuration passes") {
    const Run r = run("field-check --config " + sample("zero.json"));
    CHECK(r.code == 0);
    const Json rep = Json::parse(r.out);
    for (const auto& c : rep["cases"]) CHECK(c["max_defect"].get<double>() == 0.0);
  }
  SECTION("flipping the sign of B breaks the Yang-Mills equation") {
    const Run r = run("field-check --config " + sample("sign_flip_b.json"));
    CHECK(r.code == 1);
    double ym = 0.0;
    const Json rep = Json::parse(r.out);
    for (const auto& c : rep["cases"]) {
      const std::string id = c["id"];
      if (id.size() > 11 && id.substr(id.size() - 11) == ".yang_mills") ym = std::max(ym, c["max_defect"].get<double>());
    }
    CHECK(ym > 0.1);
  }
  SECTION("malformed configuration") {
    const fs::path bad = scratch() / "bad_config.json";
    std::ofstream(bad) << R"({"chart": {"dim": 2, "g_lower": [[1, 0], [0, 1]], "domain": [[0, 1], [0, 1]]},
                              "psi": {"terms": [{"indices": [1], "re": "sin(", "im": 0}]}})";
    const Run r = run("field-check --config \"" + bad.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("$.psi") != std::string::npos);
  }
}
