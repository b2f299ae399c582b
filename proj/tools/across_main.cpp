// Command-line workbench: matrix reduction/classification, symbolic envelope
// construction and enumeration, expression evaluation, and grid-based
// verification of the closed-form identities.
//
// Exit codes: 0 success / all checks pass; 1 semantic failure (verification
// fail, excluded-description match, pathological matrix); 2 usage or parse
// error, diagnostics on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "across/cross.hpp"
#include "across/envelope.hpp"
#include "across/errors.hpp"
#include "across/hexpr.hpp"
#include "across/radial.hpp"
#include "across/toric.hpp"

using namespace across;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string row_text(const Row& r) {
  std::string s;
  for (auto b : r) s += b ? '1' : '0';
  return s;
}

std::string one_line(const CrossMatrix& m) {
  std::string s;
  for (int i = 0; i < m.row_count(); ++i) {
    if (i) s += '|';
    s += row_text(m.row(i));
  }
  return s;
}

std::vector<std::string> row_list(const CrossMatrix& m) {
  std::vector<std::string> out;
  for (const auto& r : m.rows()) out.push_back(row_text(r));
  return out;
}

std::string fnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string grid_text(const std::vector<int>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(pts[i]);
  }
  return s;
}

FilterSet nine_filters() {
  return Filter::Antichain | Filter::ColumnCovered | Filter::NotNK | Filter::NoFullColumn;
}

int cmd_reduce(const std::string& path, const std::string& format) {
  const CrossMatrix r = reduce(CrossMatrix::parse_text(slurp(path)));
  if (format == "json") {
    json j;
    j["rows"] = row_list(r);
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "row\n";
    for (const auto& s : row_list(r)) std::cout << s << "\n";
  } else {
    std::cout << r.str();
  }
  return 0;
}

int cmd_classify(const std::string& path, const std::string& format) {
  const CrossMatrix m = CrossMatrix::parse_text(slurp(path));
  const CrossMatrix r = reduce(m);
  const Classification c = classify(r);
  if (format == "json") {
    json j;
    j["class"] = c.tag();
    j["k"] = c.k;
    j["rows"] = m.row_count();
    j["rows_reduced"] = r.row_count();
    if (c.alpha) j["alpha"] = row_text(*c.alpha);
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "class,k,rows,rows_reduced,alpha\n";
    std::cout << c.tag() << "," << c.k << "," << m.row_count() << "," << r.row_count() << ","
              << (c.alpha ? row_text(*c.alpha) : "") << "\n";
  } else {
    std::cout << "class: " << c.tag() << "\n";
    std::cout << "rows: " << m.row_count() << " (" << r.row_count() << " after reduction)\n";
    if (c.alpha) std::cout << "grouping row: " << row_text(*c.alpha) << "\n";
  }
  return 0;
}

int cmd_check(const std::string& path, const std::string& format) {
  const CrossMatrix m = CrossMatrix::parse_text(slurp(path));
  const CrossMatrix r = reduce(m);
  std::vector<int> uncovered;
  for (int j = 0; j < r.width(); ++j) {
    bool col = false;
    for (const auto& row : r.rows()) col = col || row[j];
    if (!col) uncovered.push_back(j + 1);
  }
  const bool pass = uncovered.empty();
  const std::vector<int> full = full_columns(r);
  const Classification c = classify(r);

  if (format == "json") {
    json j;
    j["width"] = r.width();
    j["rows"] = m.row_count();
    j["rows_reduced"] = r.row_count();
    j["class"] = c.tag();
    j["full_columns"] = full;
    j["x_n1_inclusion"] = pass;
    j["uncovered_columns"] = uncovered;
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "width,rows,rows_reduced,class,x_n1_inclusion,uncovered_columns\n";
    std::cout << r.width() << "," << m.row_count() << "," << r.row_count() << "," << c.tag() << ","
              << (pass ? 1 : 0) << ",";
    for (std::size_t i = 0; i < uncovered.size(); ++i)
      std::cout << (i ? " " : "") << uncovered[i];
    std::cout << "\n";
  } else {
    std::cout << "width: " << r.width() << "\n";
    std::cout << "rows: " << m.row_count() << " (" << r.row_count() << " after reduction)\n";
    std::cout << "class: " << c.tag() << "\n";
    if (!full.empty()) {
      std::cout << "full columns:";
      for (int j : full) std::cout << " " << j;
      std::cout << "\n";
    }
    if (pass) {
      std::cout << "X_{N,1} inclusion: ok\n";
    } else {
      std::cout << "X_{N,1} inclusion: FAILED, column";
      for (int j : uncovered) std::cout << " " << j;
      std::cout << (uncovered.size() > 1 ? " have" : " has") << " no branch with a big set\n";
    }
  }
  return pass ? 0 : 1;
}

int cmd_envelope(const std::string& path, const std::string& format) {
  const CrossMatrix r = reduce(CrossMatrix::parse_text(slurp(path)));
  const EnvelopeDescription d = build_envelope(r);
  const auto flat = d.flatten();
  if (format == "json") {
    json j;
    j["matrix"] = row_list(r);
    j["closed"] = flat.has_value();
    if (flat) j["expr"] = flat->str();
    j["description"] = d.str();
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "closed,expr\n";
    std::cout << (flat ? 1 : 0) << "," << (flat ? flat->str() : d.str()) << "\n";
  } else {
    std::cout << (flat ? flat->str() : d.str()) << "\n";
  }
  return 0;
}

int cmd_enumerate(int n, FilterSet filters, const std::string& format) {
  const auto out = enumerate_matrices(n, filters);
  if (format == "json") {
    json j;
    j["count"] = out.size();
    json arr = json::array();
    for (const auto& m : out) arr.push_back(row_list(m));
    j["matrices"] = arr;
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "matrix\n";
    for (const auto& m : out) std::cout << one_line(m) << "\n";
  } else {
    for (const auto& m : out) std::cout << one_line(m) << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& expr_arg, const std::string& at_arg, const std::string& format) {
  std::string text = expr_arg;
  if (std::ifstream probe(expr_arg); probe) text = slurp(expr_arg);
  const HExpr e = HExpr::parse(text);

  std::vector<Rat> h;
  std::stringstream ss(at_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) h.push_back(Rat::parse(tok));
  const Rat v = e.eval(h);

  if (format == "json") {
    json j;
    j["expr"] = e.str();
    j["value"] = v.str();
    j["approx"] = v.to_double();
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "value,approx\n" << v.str() << "," << fnum(v.to_double()) << "\n";
  } else {
    std::cout << v.str() << "\n";
  }
  return 0;
}

int cmd_nine(const std::string& format) {
  const auto& table = nine_cases();
  if (format == "json") {
    json arr = json::array();
    for (const auto& c : table) {
      json j;
      j["id"] = c.id;
      j["matrix"] = row_list(c.matrix);
      j["envelope"] = c.envelope.str();
      arr.push_back(j);
    }
    std::cout << arr.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "id,matrix,envelope\n";
    for (const auto& c : table)
      std::cout << c.id << "," << one_line(c.matrix) << "," << c.envelope.str() << "\n";
  } else {
    for (const auto& c : table)
      std::cout << c.id << "  " << one_line(c.matrix) << "  " << c.envelope.str() << "\n";
  }
  return 0;
}

int cmd_qtilde(std::uint64_t seed, const std::string& format) {
  std::vector<std::pair<std::string, HExpr>> candidates;
  for (const auto& m : enumerate_matrices(4, nine_filters()))
    if (auto flat = build_envelope(m).flatten()) candidates.emplace_back(one_line(m), *flat);
  DescEqualParams params;
  params.seed = seed;
  const QtildeReport rep = qtilde_check(candidates, params);
  const bool pass = rep.matches.empty();

  if (format == "json") {
    json j;
    j["excluded"] = qtilde_expr().str();
    j["candidates"] = rep.candidates;
    j["matches"] = rep.matches;
    j["step"] = rep.params.step.str();
    j["random_samples"] = rep.params.n_random;
    j["seed"] = rep.params.seed;
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "candidates,matches,seed\n";
    std::cout << rep.candidates << "," << rep.matches.size() << "," << rep.params.seed << "\n";
  } else {
    std::cout << "excluded: " << qtilde_expr().str() << "\n";
    std::cout << "candidates: " << rep.candidates << "\n";
    if (pass) {
      std::cout << "matches: none\n";
    } else {
      std::cout << "matches:";
      for (const auto& id : rep.matches) std::cout << " " << id;
      std::cout << "\n";
    }
  }
  return pass ? 0 : 1;
}

IdentityParams parse_case(const std::string& s) {
  const auto open = s.find('(');
  const std::string name = s.substr(0, open);
  std::vector<int> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw ParseError("malformed case: " + s);
    std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        args.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw ParseError("malformed case argument: " + tok);
      }
    }
  }
  if (name == "DISC_FORMULA" && args.empty()) return {IdentityCase::DiscFormula, 0, 0, 0};
  if (name == "CLAIM_Q6" && args.empty()) return {IdentityCase::ClaimQ6, 0, 0, 0};
  if (name == "CLAIM_Q7" && args.empty()) return {IdentityCase::ClaimQ7, 0, 0, 0};
  if (name == "PROP_CENTER" && args.size() == 2)
    return {IdentityCase::PropCenter, args[0], args[1], 0};
  if (name == "ENV_IN_ENV" && args.size() == 3)
    return {IdentityCase::EnvInEnv, args[0], args[1], args[2]};
  throw ParseError("unknown case: " + s +
                   " (expected DISC_FORMULA, PROP_CENTER(n,k), ENV_IN_ENV(n,k,l), CLAIM_Q6, or "
                   "CLAIM_Q7)");
}

void print_report_text(const VerifyReport& rep, std::uint64_t seed) {
  std::cout << "case: " << rep.case_name << "\n";
  std::cout << "grid: " << grid_text(rep.grid_pts) << "\n";
  std::cout << "max_dev: " << fnum(rep.max_dev) << "\n";
  std::cout << "tolerance: " << fnum(rep.tolerance) << "\n";
  std::cout << "sweeps: " << rep.sweeps << "\n";
  std::cout << "residual: " << fnum(rep.residual) << "\n";
  std::cout << "seed: " << seed << "\n";
  std::cout << "result: " << (rep.pass ? "PASS" : "FAIL") << "\n";
}

json report_json(const VerifyReport& rep, std::uint64_t seed) {
  json j;
  j["case"] = rep.case_name;
  j["grid"] = rep.grid_pts;
  j["max_dev"] = rep.max_dev;
  j["tolerance"] = rep.tolerance;
  j["pass"] = rep.pass;
  j["sweeps"] = rep.sweeps;
  j["residual"] = rep.residual;
  j["seed"] = seed;
  return j;
}

void report_csv_row(const VerifyReport& rep, std::uint64_t seed, bool header) {
  if (header) std::cout << "case,grid,max_dev,tolerance,pass,sweeps,residual,seed\n";
  std::cout << rep.case_name << "," << grid_text(rep.grid_pts) << "," << fnum(rep.max_dev) << ","
            << fnum(rep.tolerance) << "," << (rep.pass ? 1 : 0) << "," << rep.sweeps << ","
            << fnum(rep.residual) << "," << seed << "\n";
}

RadialModel load_model(const std::string& model_path) {
  if (model_path.empty()) return default_model(3);
  return parse_model_json(slurp(model_path));
}

int cmd_verify(const std::string& case_arg, const std::string& model_path, Profile profile,
               int points, double tolerance, const std::string& dump_path, std::uint64_t seed,
               const std::string& format) {
  const IdentityParams c = parse_case(case_arg);
  const RadialModel model = load_model(model_path);
  const int pts = points > 0 ? points : profile_points(profile, c.dims());
  const double tol = tolerance > 0 ? tolerance : profile_tolerance(profile, c.dims());
  const VerifyReport rep = verify_identity(c, model, pts, tol);

  if (!dump_path.empty()) {
    RadialModel sub;
    sub.factors.assign(model.factors.begin(), model.factors.begin() + c.dims());
    const LogGrid grid = LogGrid::for_model(sub, pts);
    const SolveResult res = compute_h_star(sub, c.a_region(sub), c.domain(), grid);
    std::ofstream out(dump_path);
    if (!out) throw ParseError("cannot open output file: " + dump_path);
    export_csv(res.fn, out);
  }

  if (format == "json") {
    std::cout << report_json(rep, seed).dump(2) << "\n";
  } else if (format == "csv") {
    report_csv_row(rep, seed, true);
  } else {
    print_report_text(rep, seed);
  }
  return rep.pass ? 0 : 1;
}

int cmd_verify_all(const std::string& model_path, Profile profile, std::uint64_t seed,
                   const std::string& format) {
  const RadialModel model = load_model(model_path);
  bool all = true;
  json arr = json::array();
  bool header = true;
  int done = 0;
  for (const auto& c : identity_catalog()) {
    const VerifyReport rep = verify_identity(c, model, profile_points(profile, c.dims()),
                                             profile_tolerance(profile, c.dims()));
    all = all && rep.pass;
    ++done;
    if (format == "json") {
      arr.push_back(report_json(rep, seed));
    } else if (format == "csv") {
      report_csv_row(rep, seed, header);
      header = false;
    } else {
      std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.case_name
                << " grid=" << grid_text(rep.grid_pts) << " dev=" << fnum(rep.max_dev)
                << " tol=" << fnum(rep.tolerance) << " sweeps=" << rep.sweeps
                << " residual=" << fnum(rep.residual) << " seed=" << seed << "\n";
    }
  }
  if (format == "json") {
    std::cout << arr.dump(2) << "\n";
  } else if (format == "text") {
    std::cout << (all ? "all " : "FAILURES among ") << done << " identities"
              << (all ? " passed" : "") << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-cross envelope workbench"};
  app.require_subcommand(1);

  std::string format = "text";
  std::uint64_t seed = 0;
  std::string profile_name = "desk";
  const auto add_common = [&](CLI::App* s) {
    s->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    s->add_option("--seed", seed, "seed for randomized comparisons")->capture_default_str();
    s->add_option("--profile", profile_name, "grid size bundle")
        ->check(CLI::IsMember({"smoke", "desk", "deep"}))
        ->capture_default_str();
  };

  std::string file, expr_arg, at_arg, case_arg, model_path, dump_path;
  int width = 0, points = 0;
  double tolerance = 0.0;
  bool f_antichain = false, f_covered = false, f_nofull = false, f_notnk = false,
       f_nottwofold = false;

  auto* c_reduce = app.add_subcommand("reduce", "drop dominated branches of a matrix");
  c_reduce->add_option("file", file, "matrix file")->required();
  add_common(c_reduce);

  auto* c_classify = app.add_subcommand("classify", "name the structural class of a matrix");
  c_classify->add_option("file", file, "matrix file")->required();
  add_common(c_classify);

  auto* c_check = app.add_subcommand("check", "validate a matrix and report pathologies");
  c_check->add_option("file", file, "matrix file")->required();
  add_common(c_check);

  auto* c_envelope = app.add_subcommand("envelope", "build the envelope description");
  c_envelope->add_option("file", file, "matrix file")->required();
  add_common(c_envelope);

  auto* c_enum = app.add_subcommand("enumerate", "list canonical matrices of a given width");
  c_enum->add_option("-n,--width", width, "number of factors")->required();
  c_enum->add_flag("--antichain", f_antichain, "keep antichains only");
  c_enum->add_flag("--covered", f_covered, "require every column covered");
  c_enum->add_flag("--no-full-column", f_nofull, "drop matrices with a full column");
  c_enum->add_flag("--not-nk", f_notnk, "drop complete-layer matrices");
  c_enum->add_flag("--not-two-fold", f_nottwofold, "drop two-fold grouped matrices");
  add_common(c_enum);

  auto* c_eval = app.add_subcommand("eval", "evaluate an expression at a rational point");
  c_eval->add_option("expr", expr_arg, "expression text or file")->required();
  c_eval->add_option("--at", at_arg, "comma-separated rational coordinates")->required();
  add_common(c_eval);

  auto* c_nine = app.add_subcommand("nine", "print the certified width-4 case table");
  add_common(c_nine);

  auto* c_qtilde = app.add_subcommand("qtilde", "compare the excluded description against all "
                                                "closed width-4 envelopes");
  add_common(c_qtilde);

  auto* c_verify = app.add_subcommand("verify", "grid-verify one closed-form identity");
  c_verify->add_option("case", case_arg, "identity name, e.g. PROP_CENTER(2,1)")->required();
  c_verify->add_option("--model", model_path, "radial model json file");
  c_verify->add_option("--points", points, "grid points per axis (overrides profile)");
  c_verify->add_option("--tolerance", tolerance, "pass threshold (overrides profile)");
  c_verify->add_option("--dump-grid", dump_path, "write the solved grid as csv");
  add_common(c_verify);

  auto* c_verify_all = app.add_subcommand("verify-all", "grid-verify the whole identity catalog");
  c_verify_all->add_option("--model", model_path, "radial model json file");
  add_common(c_verify_all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(c_reduce)) return cmd_reduce(file, format);
    if (app.got_subcommand(c_classify)) return cmd_classify(file, format);
    if (app.got_subcommand(c_check)) return cmd_check(file, format);
    if (app.got_subcommand(c_envelope)) return cmd_envelope(file, format);
    if (app.got_subcommand(c_enum)) {
      FilterSet filters = 0;
      if (f_antichain) filters = filters | Filter::Antichain;
      if (f_covered) filters = filters | Filter::ColumnCovered;
      if (f_nofull) filters = filters | Filter::NoFullColumn;
      if (f_notnk) filters = filters | Filter::NotNK;
      if (f_nottwofold) filters = filters | Filter::NotTwoFoldGrouped;
      return cmd_enumerate(width, filters, format);
    }
    if (app.got_subcommand(c_eval)) return cmd_eval(expr_arg, at_arg, format);
    if (app.got_subcommand(c_nine)) return cmd_nine(format);
    if (app.got_subcommand(c_qtilde)) return cmd_qtilde(seed, format);
    if (app.got_subcommand(c_verify))
      return cmd_verify(case_arg, model_path, parse_profile(profile_name), points, tolerance,
                        dump_path, seed, format);
    if (app.got_subcommand(c_verify_all))
      return cmd_verify_all(model_path, parse_profile(profile_name), seed, format);
  } catch (const PathologicalCrossError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
