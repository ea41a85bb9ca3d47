#ifndef EXTALG_IO_HPP
#define EXTALG_IO_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "extalg/error.hpp"
#include "extalg/expr.hpp"
#include "extalg/field_model.hpp"
#include "extalg/manifold.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"

namespace extalg {

using Json = nlohmann::json;

/// Malformed input; the message starts with the JSON path of the offending value.
class InputError : public ArgumentError {
 public:
  InputError(const std::string& path, const std::string& what) : ArgumentError(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// -- text forms of blades -------------------------------------------------------

/// 1-based indices -> "e^{1,3}" (Clifford basis) or "e^1^e^3" (Grassmann basis); "e" for the unit.
inline std::string blade_text(Blade b, Basis basis) {
  const auto idx = blade_indices(b);
  if (idx.empty()) return "e";
  std::string s;
  if (basis == Basis::Clifford) {
    s = "e^{";
    for (std::size_t p = 0; p < idx.size(); ++p) s += (p ? "," : "") + std::to_string(idx[p] + 1);
    return s + "}";
  }
  for (std::size_t p = 0; p < idx.size(); ++p) s += (p ? "^e^" : "e^") + std::to_string(idx[p] + 1);
  return s;
}

struct BladeText {
  Basis basis;
  Blade blade;
};

/// Parses either text form. Indices must be strictly increasing and within n.
inline BladeText parse_blade_text(const std::string& text, int n) {
  auto fail = [&](const std::string& why) -> BladeText { throw ArgumentError("blade \"" + text + "\": " + why); };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "e") return {Basis::Grassmann, 0};
  std::vector<int> idx;
  Basis basis;
  auto read_int = [&](std::size_t& pos) {
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected an index");
    int v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos++] - '0');
      if (v > kMaxDim) fail("index out of range");
    }
    return v;
  };
  if (s.rfind("e^{", 0) == 0) {
    basis = Basis::Clifford;
    std::size_t pos = 3;
    while (true) {
      idx.push_back(read_int(pos));
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos + 1 == s.size() && s[pos] == '}') break;
      fail("expected ',' or '}'");
    }
  } else if (s.rfind("e^", 0) == 0) {
    basis = Basis::Grassmann;
    std::size_t pos = 2;
    while (true) {
      idx.push_back(read_int(pos));
      if (pos == s.size()) break;
      if (s.compare(pos, 3, "^e^") != 0) fail("expected \"^e^\"");
      pos += 3;
    }
  } else {
    return fail("expected \"e\", \"e^{i,j,...}\" or \"e^i^e^j...\"");
  }
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (idx[p] < 1 || idx[p] > n) fail("index out of range");
    if (p > 0 && idx[p] <= idx[p - 1]) fail("indices must be strictly increasing");
  }
  Blade b = 0;
  for (int i : idx) b |= Blade{1} << (i - 1);
  return {basis, b};
}

// -- JSON reading helpers ---------------------------------------------------------

namespace detail {

inline const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(path, "missing key \"" + key + "\"");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path, "number is not finite");
  return v;
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<int>();
}

inline const Json& array(const Json& j, const std::string& path, std::size_t size = 0) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  if (size && j.size() != size) throw InputError(path, "expected " + std::to_string(size) + " entries");
  return j;
}

inline std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

/// An expression given as a string or a number.
inline Expr expression(const Json& j, const std::string& path, int dim) {
  if (j.is_number()) return number(j, path);
  if (!j.is_string()) throw InputError(path, "expected an expression string or a number");
  try {
    return parse(j.get<std::string>(), dim);
  } catch (const ParseError& e) {
    throw InputError(path, e.what());
  }
}

inline Blade indices(const Json& j, const std::string& path, int n) {
  array(j, path);
  Blade b = 0;
  int prev = 0;
  for (std::size_t p = 0; p < j.size(); ++p) {
    const int i = integer(j[p], idx(path, p));
    if (i < 1 || i > n) throw InputError(idx(path, p), "index out of range 1.." + std::to_string(n));
    if (i <= prev) throw InputError(idx(path, p), "indices must be strictly increasing");
    prev = i;
    b |= Blade{1} << (i - 1);
  }
  return b;
}

inline int dimension(const Json& j, const std::string& path) {
  const int n = integer(member(j, "dim", path), path + ".dim");
  if (n < 1 || n > kMaxDim) throw InputError(path + ".dim", "dimension out of range");
  return n;
}

}  // namespace detail

inline Json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ArgumentError("cannot open " + file);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("invalid JSON in ") + file + ": " + e.what());
  }
}

/// {"dim": n, "g_upper" | "g_lower": [[...]]}
inline Metric metric_from_json(const Json& j, const std::string& path = "$") {
  const int n = detail::dimension(j, path);
  const bool upper = j.contains("g_upper");
  if (upper == j.contains("g_lower")) throw InputError(path, "exactly one of \"g_upper\" and \"g_lower\" is required");
  const std::string key = upper ? "g_upper" : "g_lower";
  const Json& rows = detail::array(j[key], path + "." + key, n);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string rp = detail::idx(path + "." + key, i);
    const Json& row = detail::array(rows[i], rp, n);
    for (int k = 0; k < n; ++k) g(i, k) = detail::number(row[k], detail::idx(rp, k));
  }
  try {
    return Metric::make(g, upper ? Components::Upper : Components::Lower);
  } catch (const ConstructionError& e) {
    throw InputError(path + "." + key, e.what());
  }
}

inline Json metric_to_json(const Metric& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.dim(); ++k) r.push_back(m.upper(i, k));
    rows.push_back(r);
  }
  return Json{{"dim", m.dim()}, {"g_upper", rows}};
}

/// {"basis": "grassmann" | "clifford", "terms": [{"indices": [...], "re": x, "im": y}]}.
/// Clifford-basis input is converted to the Grassmann storage with the metric.
inline Multivector multivector_from_json(const Json& j, const Metric& m, const std::string& path = "$") {
  const int n = m.dim();
  Basis basis = Basis::Grassmann;
  if (j.contains("basis")) {
    const Json& b = j["basis"];
    if (!b.is_string() || (b != "grassmann" && b != "clifford"))
      throw InputError(path + ".basis", "expected \"grassmann\" or \"clifford\"");
    basis = b == "clifford" ? Basis::Clifford : Basis::Grassmann;
  }
  if (j.contains("dim") && detail::dimension(j, path) != n) throw InputError(path + ".dim", "dimension differs from the metric");
  const Json& terms = detail::array(detail::member(j, "terms", path), path + ".terms");
  Multivector u(n);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = detail::idx(path + ".terms", t);
    const Blade b = detail::indices(detail::member(terms[t], "indices", tp), tp + ".indices", n);
    const double re = terms[t].contains("re") ? detail::number(terms[t]["re"], tp + ".re") : 0.0;
    const double im = terms[t].contains("im") ? detail::number(terms[t]["im"], tp + ".im") : 0.0;
    u[b] += Complex(re, im);
  }
  return basis_convert(u, basis, Basis::Grassmann, m);
}

// -- charts, form fields, configurations ---------------------------------------------

/// {"dim": n, "g_lower": [["expr", ...], ...], "domain": [[lo, hi], ...]}
inline Chart chart_from_json(const Json& j, const std::string& path = "$") {
  const int n = detail::dimension(j, path);
  if (n > kMaxJetDim) throw InputError(path + ".dim", "charts support n <= 4");
  const Json& rows = detail::array(detail::member(j, "g_lower", path), path + ".g_lower", n);
  std::vector<Expr> g;
  for (int i = 0; i < n; ++i) {
    const std::string rp = detail::idx(path + ".g_lower", i);
    const Json& row = detail::array(rows[i], rp, n);
    for (int k = 0; k < n; ++k) g.push_back(detail::expression(row[k], detail::idx(rp, k), n));
  }
  const Json& dom = detail::array(detail::member(j, "domain", path), path + ".domain", n);
  std::vector<Interval> box;
  for (int i = 0; i < n; ++i) {
    const std::string dp = detail::idx(path + ".domain", i);
    const Json& iv = detail::array(dom[i], dp, 2);
    box.push_back({detail::number(iv[0], detail::idx(dp, 0)), detail::number(iv[1], detail::idx(dp, 1))});
  }
  try {
    return Chart::make(n, std::move(g), std::move(box));
  } catch (const Error& e) {
    throw InputError(path, e.what());
  }
}

/// {"terms": [{"indices": [...], "re": "expr", "im": "expr"}]} on the Grassmann basis.
inline FormField form_field_from_json(const Json& j, int n, const std::string& path) {
  if (j.contains("basis") && j["basis"] != "grassmann")
    throw InputError(path + ".basis", "form fields are given on the Grassmann basis");
  const Json& terms = detail::array(detail::member(j, "terms", path), path + ".terms");
  FormField f(n);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = detail::idx(path + ".terms", t);
    const Blade b = detail::indices(detail::member(terms[t], "indices", tp), tp + ".indices", n);
    const Expr re = terms[t].contains("re") ? detail::expression(terms[t]["re"], tp + ".re", n) : Expr();
    const Expr im = terms[t].contains("im") ? detail::expression(terms[t]["im"], tp + ".im", n) : Expr();
    f.add(b, re, im);
  }
  return f;
}

/// A configuration file: the fields, the coupling constants and the sample points.
struct FieldCheckInput {
  FieldConfig config;
  double c1 = 1.0;
  double c2 = 1.0;
  std::vector<std::vector<double>> points;
};

/// {"chart": {...}, "psi": form, "a": [form x n], "B": [form x n], "H": form, "m": x,
///  "c1": x, "c2": x, "points": [[...], ...]}; missing points give a 2-per-axis grid.
inline FieldCheckInput field_config_from_json(const Json& j, const std::string& path = "$") {
  if (!j.is_object()) throw InputError(path, "expected an object");
  Chart chart = chart_from_json(detail::member(j, "chart", path), path + ".chart");
  const int n = chart.dim();
  FormField psi = form_field_from_json(detail::member(j, "psi", path), n, path + ".psi");
  auto list = [&](const char* key) {
    const std::string lp = path + "." + key;
    const Json& arr = detail::array(detail::member(j, key, path), lp, n);
    std::vector<FormField> out;
    for (int k = 0; k < n; ++k) out.push_back(form_field_from_json(arr[k], n, detail::idx(lp, k)));
    return out;
  };
  std::vector<FormField> a = list("a");
  std::vector<FormField> b = list("B");
  FormField h = form_field_from_json(detail::member(j, "H", path), n, path + ".H");
  const double m = j.contains("m") ? detail::number(j["m"], path + ".m") : 0.0;
  FieldCheckInput in{[&] {
                       try {
                         return FieldConfig::make(chart, psi, a, b, h, m);
                       } catch (const Error& e) {
                         throw InputError(path, e.what());
                       }
                     }(),
                     1.0, 1.0, {}};
  if (j.contains("c1")) in.c1 = detail::number(j["c1"], path + ".c1");
  if (j.contains("c2")) in.c2 = detail::number(j["c2"], path + ".c2");
  if (!(in.c1 > 0)) throw InputError(path + ".c1", "must be positive");
  if (!(in.c2 > 0)) throw InputError(path + ".c2", "must be positive");
  if (j.contains("points")) {
    const Json& pts = detail::array(j["points"], path + ".points");
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const std::string pp = detail::idx(path + ".points", p);
      const Json& pt = detail::array(pts[p], pp, n);
      std::vector<double> x;
      for (int i = 0; i < n; ++i) x.push_back(detail::number(pt[i], detail::idx(pp, i)));
      if (!chart.contains(x)) throw InputError(pp, "point lies outside the chart domain");
      in.points.push_back(std::move(x));
    }
  } else {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) {
        const auto& iv = chart.domain()[i];
        x[i] = iv.lo + ((mask >> i) & 1u ? 2.0 : 1.0) * (iv.hi - iv.lo) / 3.0;
      }
      in.points.push_back(std::move(x));
    }
  }
  return in;
}

// -- JSON writing with fixed field order ------------------------------------------------

/// 17 significant digits; non-finite values become null.
inline std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) { return Json(s).dump(); }

inline std::string json_indices(Blade b) {
  std::string s = "[";
  const auto idx = blade_indices(b);
  for (std::size_t p = 0; p < idx.size(); ++p) s += (p ? "," : "") + std::to_string(idx[p] + 1);
  return s + "]";
}

inline std::string multivector_to_json(const Multivector& u, Basis basis = Basis::Grassmann,
                                       const Metric* m = nullptr) {
  Multivector v = u;
  if (basis == Basis::Clifford) {
    if (!m) throw ArgumentError("multivector_to_json: Clifford output needs the metric");
    v = basis_convert(u, Basis::Grassmann, Basis::Clifford, *m);
  }
  std::string s = "{\"basis\":" + json_string(basis == Basis::Clifford ? "clifford" : "grassmann") + ",\"terms\":[";
  bool first = true;
  for (Blade b = 0; b < v.size(); ++b) {
    if (v[b] == Complex{}) continue;
    s += (first ? "" : ",") + std::string("{\"indices\":") + json_indices(b) + ",\"re\":" + json_number(v[b].real()) +
         ",\"im\":" + json_number(v[b].imag()) + "}";
    first = false;
  }
  return s + "]}";
}

// -- multiplication tables ---------------------------------------------------------------

struct TableEntry {
  Blade a;
  Blade b;
  Multivector product;  // coefficients on the chosen basis
};

/// All products of basis elements of the chosen basis, expanded in that basis.
inline std::vector<TableEntry> multiplication_table(const Metric& m, Basis basis) {
  if (m.dim() > 8) throw ArgumentError("multiplication_table: n <= 8 required");
  const Table t = build_product_table(m);
  const int n = m.dim();
  std::vector<Multivector> elems;
  for (Blade b = 0; b < t.size(); ++b)
    elems.push_back(basis_convert(Multivector::blade(n, b), basis, Basis::Grassmann, m));
  std::vector<TableEntry> out;
  out.reserve(t.size() * t.size());
  for (Blade a = 0; a < t.size(); ++a)
    for (Blade b = 0; b < t.size(); ++b)
      out.push_back({a, b, basis_convert(clifford_mul(elems[a], elems[b], t), Basis::Grassmann, basis, m)});
  return out;
}

inline std::string multiplication_table_json(const Metric& m, Basis basis) {
  const auto entries = multiplication_table(m, basis);
  std::string s = "{\"dim\":" + std::to_string(m.dim()) + ",\"basis\":" +
                  json_string(basis == Basis::Clifford ? "clifford" : "grassmann") + ",\"g_upper\":[";
  for (int i = 0; i < m.dim(); ++i) {
    s += i ? ",[" : "[";
    for (int k = 0; k < m.dim(); ++k) s += (k ? "," : "") + json_number(m.upper(i, k));
    s += "]";
  }
  s += "],\"products\":[";
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& en = entries[e];
    s += (e ? ",\n" : "\n") + std::string("{\"a\":") + json_indices(en.a) + ",\"b\":" + json_indices(en.b) +
         ",\"terms\":[";
    bool first = true;
    for (Blade g = 0; g < en.product.size(); ++g) {
      const Complex c = en.product[g];
      if (std::abs(c) < 1e-15) continue;
      s += (first ? "" : ",") + std::string("{\"indices\":") + json_indices(g) + ",\"re\":" + json_number(c.real()) +
           ",\"im\":" + json_number(c.imag()) + "}";
      first = false;
    }
    s += "]}";
  }
  return s + "\n]}\n";
}

inline std::string multiplication_table_csv(const Metric& m, Basis basis) {
  const auto entries = multiplication_table(m, basis);
  std::string s = "a,b,gamma,re,im\n";
  for (const auto& en : entries)
    for (Blade g = 0; g < en.product.size(); ++g) {
      const Complex c = en.product[g];
      if (std::abs(c) < 1e-15) continue;
      s += blade_text(en.a, basis) + "," + blade_text(en.b, basis) + "," + blade_text(g, basis) + "," +
           json_number(c.real()) + "," + json_number(c.imag()) + "\n";
    }
  return s;
}

}  // namespace extalg

#endif  // EXTALG_IO_HPP
