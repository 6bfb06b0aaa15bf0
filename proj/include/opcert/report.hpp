#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "opcert/catalog.hpp"
#include "opcert/certify.hpp"
#include "opcert/spectrum.hpp"

namespace opcert {

/// Full classification record for one operator. Consistency flags are
/// recomputed from the certificates inside the report itself.
struct Report {
  std::string format_version = "1";
  Operator op;
  CertifyBudget budget;
  EllipticityCertificate r_cert;
  EllipticityCertificate c_cert;
  RankCertificate rank_cert;
  RankOneReport rank_one;  // carries the mixing certificate
  PolyKernel kernel;
  bool consistent = true;
  std::vector<std::string> inconsistencies;
  double elapsed_seconds = 0.0;  // excluded from hashing

  explicit Report(Operator o) : op(std::move(o)) {}
};

/// The cross-implication checks: C-elliptic => R-elliptic;
/// R-elliptic and mixing => C-elliptic; mixing <=> rank-one when both
/// verdicts are determinate. Violations indicate a soundness bug.
inline void evaluate_consistency(Report& rep) {
  rep.inconsistencies.clear();
  const auto& r = rep.r_cert.verdict;
  const auto& c = rep.c_cert.verdict;
  const auto& m = rep.rank_one.mixing.verdict;
  if (c == Verdict::elliptic && r == Verdict::not_elliptic)
    rep.inconsistencies.push_back("C-elliptic but not R-elliptic");
  if (r == Verdict::elliptic && m == MixingVerdict::holds &&
      c == Verdict::not_elliptic)
    rep.inconsistencies.push_back("R-elliptic with mixing but not C-elliptic");
  if (c == Verdict::not_elliptic && r == Verdict::elliptic &&
      m == MixingVerdict::holds)
    rep.inconsistencies.push_back(
        "mixing holds but C-ellipticity fails despite R-ellipticity");
  if (!rep.rank_one.consistent)
    rep.inconsistencies.push_back("rank-one span complete but mixing fails");
  if (rep.rank_one.span.complete && m == MixingVerdict::fails &&
      rep.rank_one.mixing.certified)
    rep.inconsistencies.push_back("certified mixing failure with complete span");
  rep.consistent = rep.inconsistencies.empty();
}

inline Report classify(const Operator& op, const CertifyBudget& budget = {}) {
  auto t0 = std::chrono::steady_clock::now();
  Report rep(op);
  rep.budget = budget;
  rep.r_cert = check_r_elliptic(op, budget);
  rep.c_cert = check_c_elliptic(op, budget);
  rep.rank_cert = check_constant_rank(op, budget);
  rep.rank_one = check_rank_one_property(op, budget);
  rep.kernel = kernel_polynomials(op, 4);
  evaluate_consistency(rep);
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Compares a report against catalog expectations; returns human-readable
/// mismatch strings (empty = all expectations met).
inline std::vector<std::string> check_expected(const Report& rep,
                                               const ExpectedVerdicts& exp) {
  std::vector<std::string> bad;
  auto verdict_bool = [](Verdict v) -> std::optional<bool> {
    if (v == Verdict::elliptic) return true;
    if (v == Verdict::not_elliptic) return false;
    return std::nullopt;
  };
  if (exp.r_elliptic && verdict_bool(rep.r_cert.verdict) != exp.r_elliptic)
    bad.push_back("R-ellipticity verdict mismatch");
  if (exp.c_elliptic && verdict_bool(rep.c_cert.verdict) != exp.c_elliptic)
    bad.push_back("C-ellipticity verdict mismatch");
  if (exp.rank) {
    if (rep.rank_cert.verdict != RankVerdict::constant_rank)
      bad.push_back("constant-rank verdict mismatch");
    else if (rep.rank_cert.r != *exp.rank)
      bad.push_back("rank value mismatch");
  }
  if (exp.mixing_holds) {
    auto mv = rep.rank_one.mixing.verdict;
    bool holds = mv == MixingVerdict::holds;
    bool fails = mv == MixingVerdict::fails;
    if (*exp.mixing_holds ? !holds : !fails)
      bad.push_back("mixing verdict mismatch");
  }
  if (exp.rank_one && rep.rank_one.span.complete != *exp.rank_one)
    bad.push_back("rank-one span completeness mismatch");
  if (exp.kernel_dims && rep.kernel.dims != *exp.kernel_dims)
    bad.push_back("kernel dimension ladder mismatch");
  if (exp.stabilization) {
    int got = rep.kernel.stabilization_degree ? *rep.kernel.stabilization_degree : -1;
    if (got != *exp.stabilization) bad.push_back("stabilization degree mismatch");
  }
  if (!rep.consistent) bad.push_back("consistency flags raised");
  return bad;
}

}  // namespace opcert
