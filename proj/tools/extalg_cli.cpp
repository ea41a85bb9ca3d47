// extalg: multiplication tables, identity suites and field-equation checks.
//
//   extalg mul-table --metric m.json [--basis grassmann|clifford] [--format json|csv] [--out FILE]
//   extalg verify SUITE [--seed N] [--count N] [--format json|csv] [--out FILE] [--timing]
//   extalg field-check --config c.json [--format json|csv] [--out FILE]
//
// Exit codes: 0 when every case passes, 1 when a case fails, 2 on usage or input errors.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "extalg/extalg.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 7;
constexpr double kFieldTolerance = 1e-8;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw extalg::ArgumentError("cannot write " + out);
  f << text;
}

extalg::Basis parse_basis(const std::string& s) {
  return s == "clifford" ? extalg::Basis::Clifford : extalg::Basis::Grassmann;
}

std::string point_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point%03zu", i);
  return buf;
}

/// Residuals of the field system at every configured point, one case per quantity.
extalg::RunReport field_check(const extalg::FieldCheckInput& in) {
  using namespace extalg;
  RunReport rep{"field-check", 0, static_cast<int>(in.points.size()), {}, std::nullopt};
  for (std::size_t i = 0; i < in.points.size(); ++i) {
    const std::string id = point_id(i);
    auto add = [&](const std::string& name, double defect) {
      Defect d;
      d.add(defect);
      CaseResult c = make_case(name, d, kFieldTolerance);
      c.point = in.points[i];
      rep.cases.push_back(std::move(c));
    };
    const PointFields pf = evaluate(in.config, in.points[i]);
    const SystemResiduals r = system_residuals(pf, in.c1, in.c2);
    add(id + ".main", r.main_norm());
    add(id + ".maxwell", r.maxwell_norm());
    add(id + ".yang_mills", r.yang_mills_norm());
    add(id + ".h", r.h.max_norm());
    add(id + ".curvature_link", r.curvature_link);
    // The conservation identity presupposes that H solves its own equations.
    if (r.h.max_norm() < kHDefectTolerance) add(id + ".conservation", conservation_defect(pf));
  }
  std::sort(rep.cases.begin(), rep.cases.end(),
            [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford and exterior algebra toolkit"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out, "Write the report to FILE instead of stdout");
  };

  std::string metric_file, basis = "grassmann";
  CLI::App* mul = app.add_subcommand("mul-table", "Structure constants of the Clifford product");
  mul->add_option("--metric", metric_file, "Metric JSON file")->required();
  mul->add_option("--basis", basis, "Basis of the table")->check(CLI::IsMember({"grassmann", "clifford"}));
  add_common(mul);

  std::string suite;
  std::uint64_t seed = kDefaultSeed;
  int count = 0;
  bool timing = false;
  CLI::App* verify = app.add_subcommand("verify", "Run a seeded identity suite");
  verify->add_option("suite,--suite", suite, "Suite name: algebra, hodge, spin, manifold, field or dirac");
  verify->add_option("--seed", seed, "Random seed (default 7)");
  verify->add_option("--count", count, "Trial count (default depends on the suite)");
  verify->add_flag("--timing", timing, "Include wall_time in the report");
  add_common(verify);

  std::string config_file;
  CLI::App* field = app.add_subcommand("field-check", "Evaluate the field equations on a point grid");
  field->add_option("--config", config_file, "Field configuration JSON file")->required();
  add_common(field);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*mul) {
      const extalg::Metric m = extalg::metric_from_json(extalg::load_json_file(metric_file));
      const extalg::Basis b = parse_basis(basis);
      emit(format == "csv" ? extalg::multiplication_table_csv(m, b) : extalg::multiplication_table_json(m, b), out);
      return kExitPass;
    }
    if (*verify) {
      if (suite.empty()) throw extalg::ArgumentError("no suite given; expected one of algebra, hodge, spin, manifold, field, dirac");
      if (!extalg::is_suite(suite)) throw extalg::ArgumentError("unknown suite \"" + suite + "\"");
      if (count == 0) count = extalg::default_count(suite);
      std::cerr << "seed: " << seed << "\n";
      const auto start = std::chrono::steady_clock::now();
      extalg::RunReport rep = extalg::run_suite(suite, seed, count);
      if (timing) rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      emit(format == "csv" ? extalg::report_csv(rep) : extalg::report_json(rep), out);
      return rep.passed() ? kExitPass : kExitFail;
    }
    const extalg::FieldCheckInput in = extalg::field_config_from_json(extalg::load_json_file(config_file));
    const extalg::RunReport rep = field_check(in);
    emit(format == "csv" ? extalg::report_csv(rep) : extalg::report_json(rep), out);
    return rep.passed() ? kExitPass : kExitFail;
  } catch (const extalg::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const extalg::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const extalg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
