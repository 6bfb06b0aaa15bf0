#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "opcert/json_io.hpp"
#include "opcert/slicing.hpp"

using namespace opcert;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitIndeterminate = 2;
constexpr int kExitInputError = 3;
constexpr int kExitInconsistency = 4;

Vec<Rat> parse_rat_vec(const std::string& s) {
  Vec<Rat> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(parse_rat(tok));
  if (v.empty()) throw IoError(IoErrorCode::schema, "empty vector literal");
  return v;
}

std::vector<double> to_doubles(const Vec<Rat>& v) {
  std::vector<double> d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = to_double(v[i]);
  return d;
}

RankOneTriple parse_triple(const std::string& s) {
  // "w_star;xi;v_star", each a comma-separated rational vector
  std::vector<Vec<Rat>> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) parts.push_back(parse_rat_vec(tok));
  if (parts.size() != 3)
    throw IoError(IoErrorCode::schema, "triple must be 'w*;xi;v*'");
  return {parts[0], parts[1], parts[2]};
}

std::string verdict_name(Verdict v) { return detail::verdict_str(v); }

void print_report_text(const Report& rep) {
  std::printf("operator: %s (n=%d, V=%d, W=%d)\n", rep.op.name().c_str(),
              rep.op.n(), rep.op.dim_v(), rep.op.dim_w());
  std::printf("  R-elliptic: %-14s lower_bound=%.9g\n",
              verdict_name(rep.r_cert.verdict).c_str(), rep.r_cert.lower_bound);
  std::printf("  C-elliptic: %-14s lower_bound=%.9g\n",
              verdict_name(rep.c_cert.verdict).c_str(), rep.c_cert.lower_bound);
  std::printf("  constant rank: %s r=%d sigma_r>=%.9g\n",
              detail::rank_verdict_str(rep.rank_cert.verdict), rep.rank_cert.r,
              rep.rank_cert.sigma_r_lower);
  std::printf("  mixing: %s%s\n",
              detail::mixing_verdict_str(rep.rank_one.mixing.verdict),
              rep.rank_one.mixing.certified ? " (certified)" : "");
  std::printf("  rank-one span: %d / %d %s\n", rep.rank_one.span.span_dim,
              rep.rank_one.span.target_dim,
              rep.rank_one.span.complete ? "(complete)" : "(incomplete)");
  std::printf("  kernel dims (deg 0..%d):", rep.kernel.d_max);
  for (int d : rep.kernel.dims) std::printf(" %d", d);
  if (rep.kernel.stabilization_degree)
    std::printf("  stabilizes at l=%d\n", *rep.kernel.stabilization_degree);
  else
    std::printf("  not stabilized\n");
  std::printf("  consistent: %s\n", rep.consistent ? "yes" : "NO");
  for (const auto& s : rep.inconsistencies) std::printf("    ! %s\n", s.c_str());
}

int report_exit_code(const Report& rep) {
  if (!rep.consistent) return kExitInconsistency;
  bool indeterminate =
      rep.r_cert.verdict == Verdict::indeterminate ||
      rep.c_cert.verdict == Verdict::indeterminate ||
      rep.rank_cert.verdict == RankVerdict::indeterminate;
  return indeterminate ? kExitIndeterminate : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified analysis of first-order constant-coefficient operators"};
  app.require_subcommand(1);

  double tol = 1e-8;
  long long budget_boxes = 10000000;
  long long seed = 0;
  bool as_json = false;
  bool emit_plots = false;
  app.add_option("--tol", tol, "verdict tolerance");
  app.add_option("--budget", budget_boxes, "branch-and-bound box budget");
  app.add_option("--seed", seed, "seed recorded in outputs (pipeline is deterministic)");
  app.add_flag("--json", as_json, "machine-readable JSON output");
  app.add_flag("--emit-plots", emit_plots, "write CSV tables for plotting");

  std::string op_path, field_path, cert_path, out_path;
  std::string xi_str, v_str, triple_str, pair1_str, pair2_str, cat_action;
  double alpha0 = 0.2, alpha = 0.1, step = 0.0;

  auto* cmd_classify = app.add_subcommand("classify", "full classification report");
  cmd_classify->add_option("op", op_path)->required();
  cmd_classify->add_option("--out", out_path, "write the report JSON here");

  auto* cmd_spectrum = app.add_subcommand("spectrum", "rank-one vectors / span sweep");
  cmd_spectrum->add_option("op", op_path)->required();
  cmd_spectrum->add_option("--xi", xi_str, "direction, comma-separated rationals");
  cmd_spectrum->add_option("--v", v_str, "v*, comma-separated rationals");

  auto* cmd_polarize = app.add_subcommand("polarize", "polarization witness");
  cmd_polarize->add_option("op", op_path)->required();
  cmd_polarize->add_option("--pair1", pair1_str, "'xi;e'")->required();
  cmd_polarize->add_option("--pair2", pair2_str, "'eta;f'")->required();

  auto* cmd_slice = app.add_subcommand("slice-verify", "discrete slicing inequality");
  cmd_slice->add_option("op", op_path)->required();
  cmd_slice->add_option("field", field_path)->required();
  cmd_slice->add_option("--triple", triple_str, "'w*;xi;v*'")->required();

  auto* cmd_strip = app.add_subcommand("strip-verify", "boundary strip estimate");
  cmd_strip->add_option("op", op_path)->required();
  cmd_strip->add_option("field", field_path)->required();
  cmd_strip->add_option("--triple", triple_str, "'w*;xi;v*'")->required();
  cmd_strip->add_option("--alpha0", alpha0);
  cmd_strip->add_option("--alpha", alpha);

  auto* cmd_translate = app.add_subcommand("translate-probe", "translation defect ladder");
  cmd_translate->add_option("field", field_path)->required();
  cmd_translate->add_option("--xi", xi_str, "direction")->required();
  cmd_translate->add_option("--v", v_str, "v*")->required();
  cmd_translate->add_option("--step", step, "single step (default: ladder)");

  auto* cmd_verify = app.add_subcommand("verify-cert", "re-derive and compare");
  cmd_verify->add_option("cert", cert_path)->required();

  auto* cmd_catalog = app.add_subcommand("catalog", "built-in operator catalog");
  cmd_catalog->add_option("action", cat_action, "list|run")->required();

  CLI11_PARSE(app, argc, argv);

  CertifyBudget budget;
  budget.tol = tol;
  budget.max_boxes = budget_boxes;

  try {
    if (*cmd_classify) {
      Report rep = classify(load_operator(op_path).op, budget);
      json j = report_to_json(rep, std::to_string(seed));
      if (!out_path.empty()) write_json_file(out_path, j);
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else
        print_report_text(rep);
      return report_exit_code(rep);
    }

    if (*cmd_spectrum) {
      Operator op = load_operator(op_path).op;
      std::vector<RankOneTriple> triples;
      if (!xi_str.empty()) {
        triples = rank_one_from_xi(op, parse_rat_vec(xi_str));
      } else if (!v_str.empty()) {
        triples = rank_one_from_v(op, parse_rat_vec(v_str));
      } else {
        auto rep = check_rank_one_property(op, budget);
        triples = rep.span.triples;
        if (!as_json)
          std::printf("span %d / %d (%s)\n", rep.span.span_dim, rep.span.target_dim,
                      rep.span.complete ? "complete" : "incomplete");
      }
      json out = json::array();
      for (const auto& t : triples)
        out.push_back({{"w_star", detail::vec_json(t.w_star)},
                       {"xi", detail::vec_json(t.xi)},
                       {"v_star", detail::vec_json(t.v_star)}});
      if (as_json)
        std::cout << out.dump(2) << "\n";
      else
        for (const auto& t : out)
          std::printf("w*=%s xi=%s v*=%s\n", t["w_star"].dump().c_str(),
                      t["xi"].dump().c_str(), t["v_star"].dump().c_str());
      return triples.empty() ? kExitCheckFailed : kExitPass;
    }

    if (*cmd_polarize) {
      Operator op = load_operator(op_path).op;
      auto split_pair = [](const std::string& s) {
        auto semi = s.find(';');
        if (semi == std::string::npos)
          throw IoError(IoErrorCode::schema, "pair must be 'xi;v'");
        return std::make_pair(parse_rat_vec(s.substr(0, semi)),
                              parse_rat_vec(s.substr(semi + 1)));
      };
      try {
        PolarizationWitness w = polarize(op, split_pair(pair1_str), split_pair(pair2_str));
        json j = {{"gamma", rat_to_string(w.gamma)},
                  {"w0", detail::vec_json(w.w0)},
                  {"w1", detail::vec_json(w.w1)},
                  {"w2", detail::vec_json(w.w2)}};
        std::cout << (as_json ? j.dump(2) : "gamma = " + rat_to_string(w.gamma) +
                                                "\n" + j.dump(2)) << "\n";
        return kExitPass;
      } catch (const PolarizeError& e) {
        std::cerr << "polarize failed: " << e.what() << "\n";
        return kExitCheckFailed;
      }
    }

    if (*cmd_slice) {
      Operator op = load_operator(op_path).op;
      GridField field = load_field(field_path);
      SliceReport rep = verify_slicing(field, op, parse_triple(triple_str));
      json j = {{"lhs", rep.lhs},     {"rhs", rep.rhs},   {"slack", rep.slack},
                {"tv", rep.tv},       {"pass", rep.pass}, {"c_slack", rep.c_slack},
                {"xi_norm", rep.xi_norm}};
      std::cout << j.dump(2) << "\n";
      if (emit_plots) {
        std::vector<double> xid = to_doubles(rep.xi);
        double nrm = 0;
        for (double x : xid) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : xid) x /= nrm;
        auto tv = slice_tv(field, xid, to_doubles(rep.v_star));
        std::ofstream out(field_path + ".line_tvs.csv");
        out << "line,tv\n";
        for (size_t i = 0; i < tv.line_tvs.size(); ++i)
          out << i << "," << tv.line_tvs[i] << "\n";
      }
      return rep.pass ? kExitPass : kExitCheckFailed;
    }

    if (*cmd_strip) {
      Operator op = load_operator(op_path).op;
      GridField field = load_field(field_path);
      StripReport rep =
          boundary_strip_estimate(field, op, parse_triple(triple_str), alpha0, alpha);
      json j = {{"lhs", rep.lhs},
                {"surface_term", rep.surface_term},
                {"variation_term", rep.variation_term},
                {"rhs", rep.rhs},
                {"rho1", rep.rho1},
                {"slack", rep.slack},
                {"pass", rep.pass}};
      std::cout << j.dump(2) << "\n";
      return rep.pass ? kExitPass : kExitCheckFailed;
    }

    if (*cmd_translate) {
      GridField field = load_field(field_path);
      std::vector<double> xi = to_doubles(parse_rat_vec(xi_str));
      std::vector<double> v = to_doubles(parse_rat_vec(v_str));
      double h = field.domain->h;
      std::vector<double> steps;
      if (step > 0)
        steps.push_back(step);
      else
        for (int k = 1; k <= 16; k *= 2) steps.push_back(k * h);
      json table = json::array();
      std::ofstream plot;
      if (emit_plots) {
        plot.open(field_path + ".defect.csv");
        plot << "step,defect,defect_over_step\n";
      }
      for (double s : steps) {
        auto rep = translation_defect(field, s, xi, v);
        table.push_back({{"step", s},
                         {"defect", rep.defect},
                         {"defect_over_step", rep.defect / s},
                         {"snapped", rep.snapped}});
        if (emit_plots)
          plot << s << "," << rep.defect << "," << rep.defect / s << "\n";
      }
      std::cout << table.dump(2) << "\n";
      return kExitPass;
    }

    if (*cmd_verify) {
      VerifyResult res = verify_report_json(read_json_file(cert_path));
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      if (res.ok) {
        std::cout << "certificate verified\n";
        return kExitPass;
      }
      for (const auto& f : res.failures) std::cerr << "FAIL: " << f << "\n";
      return kExitCheckFailed;
    }

    if (*cmd_catalog) {
      auto cat = builtin_catalog();
      if (cat_action == "list") {
        for (const auto& e : cat)
          std::printf("%-22s n=%d V=%d W=%d  (%s)\n", e.op.name().c_str(), e.op.n(),
                      e.op.dim_v(), e.op.dim_w(), e.expected.provenance.c_str());
        return kExitPass;
      }
      if (cat_action != "run")
        throw IoError(IoErrorCode::schema, "catalog action must be list or run");
      bool all_ok = true, any_inconsistent = false;
      json out = json::array();
      for (const auto& e : cat) {
        Report rep = classify(e.op, budget);
        auto bad = check_expected(rep, e.expected);
        if (!rep.consistent) any_inconsistent = true;
        if (!bad.empty()) all_ok = false;
        if (as_json) {
          json j = report_to_json(rep, std::to_string(seed));
          j["expected_mismatches"] = bad;
          out.push_back(std::move(j));
        } else {
          std::printf("%-22s %s\n", e.op.name().c_str(),
                      bad.empty() ? "ok" : "MISMATCH");
          for (const auto& b : bad) std::printf("    ! %s\n", b.c_str());
        }
      }
      if (as_json) std::cout << out.dump(2) << "\n";
      if (any_inconsistent) return kExitInconsistency;
      return all_ok ? kExitPass : kExitCheckFailed;
    }
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInconsistency;
  }
  return kExitInputError;
}
