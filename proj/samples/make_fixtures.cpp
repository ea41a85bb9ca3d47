// Writes the JSON inputs used by the command-line tests into a directory
// (default samples/data).
//
//   make_fixtures [DIR]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

using Json = nlohmann::ordered_json;

namespace {

void write(const std::filesystem::path& dir, const std::string& name, const Json& j) {
  std::ofstream f(dir / name, std::ios::binary);
  f << j.dump(2) << "\n";
  std::cout << "wrote " << (dir / name).string() << "\n";
}

Json term(std::vector<int> indices, const Json& re, const Json& im = 0) {
  return Json{{"indices", indices}, {"re", re}, {"im", im}};
}

Json form(std::vector<Json> terms = {}) { return Json{{"terms", terms}}; }

Json metric(int dim, const char* key, std::vector<std::vector<double>> g) {
  return Json{{"dim", dim}, {key, g}};
}

Json minkowski_chart() {
  return Json{{"dim", 4},
              {"g_lower", {{-1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}}},
              {"domain", {{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}}};
}

/// Psi = 0, a plane electromagnetic wave in a_2, H = dx^4 and the pure-gauge
/// B_k = U^-1 d_k U with U = exp(t1 e^{12}) exp(t2 e^{23}), t1 = 0.7 x1 + 0.3 x3,
/// t2 = 0.5 x2 + 0.4 x4. G vanishes, so the curvature link holds in flat space.
Json flat_minkowski(double sign) {
  const std::vector<double> d1{0.7, 0.0, 0.3, 0.0}, d2{0.0, 0.5, 0.0, 0.4};
  const std::string c = "cos(x2 + 0.8*x4)", s = "sin(x2 + 0.8*x4)";
  Json b = Json::array();
  for (int k = 0; k < 4; ++k) {
    std::vector<Json> terms;
    if (d1[k] != 0.0) {
      terms.push_back(term({1, 2}, std::to_string(sign * d1[k]) + "*" + c));
      terms.push_back(term({1, 3}, std::to_string(-sign * d1[k]) + "*" + s));
    }
    if (d2[k] != 0.0) terms.push_back(term({2, 3}, sign * d2[k]));
    b.push_back(form(terms));
  }
  Json a = Json::array();
  for (int k = 0; k < 4; ++k)
    a.push_back(k == 1 ? form({term({}, 0, "0.5*cos(0.6*x1 + 0.8*x3 + x4)")}) : form());
  return Json{{"chart", minkowski_chart()}, {"psi", form()}, {"a", a},           {"B", b},
              {"H", form({term({4}, 1)})},  {"m", 0.5},         {"c1", 1.0},   {"c2", 1.0}};
}

Json zero_config() {
  Json empty = Json::array({form(), form(), form(), form()});
  return Json{{"chart", minkowski_chart()}, {"psi", form()}, {"a", empty}, {"B", empty},
              {"H", form({term({4}, 1)})},  {"m", 0.5}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "samples/data";
  std::filesystem::create_directories(dir);
  write(dir, "metric_negative_line.json", metric(1, "g_upper", {{-1}}));
  write(dir, "metric_quaternion.json", metric(2, "g_upper", {{-1, 0}, {0, -1}}));
  write(dir, "metric_diagonal3.json", metric(3, "g_upper", {{2, 0, 0}, {0, -0.5, 0}, {0, 0, 1}}));
  write(dir, "metric_oblique3.json", metric(3, "g_upper", {{1, 0.3, 0}, {0.3, -1, 0.2}, {0, 0.2, 2}}));
  write(dir, "metric_minkowski.json", metric(4, "g_lower", {{-1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}}));
  write(dir, "metric_malformed.json", Json{{"dim", 2}, {"g_upper", {{1, "x"}, {0, 1}}}});
  write(dir, "flat_minkowski.json", flat_minkowski(1.0));
  write(dir, "sign_flip_b.json", flat_minkowski(-1.0));
  write(dir, "zero.json", zero_config());
  return 0;
}
