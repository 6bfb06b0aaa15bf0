#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opcert/grid.hpp"
#include "opcert/report.hpp"

namespace opcert {

using nlohmann::json;

enum class IoErrorCode {
  schema = 1,        // missing/ill-typed fields
  bad_rational = 2,  // unparseable or zero-denominator literal
  dimension = 3,     // sizes inconsistent with n/dimV/dimW
  file = 4,          // unreadable path / invalid JSON text
};

struct IoError : std::runtime_error {
  IoErrorCode code;
  IoError(IoErrorCode c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
};

namespace detail {

inline Rat json_rat(const json& j) {
  if (!j.is_string())
    throw IoError(IoErrorCode::schema, "rational entries must be strings");
  try {
    return parse_rat(j.get<std::string>());
  } catch (const std::exception& e) {
    throw IoError(IoErrorCode::bad_rational,
                  "bad rational literal '" + j.get<std::string>() + "': " + e.what());
  }
}

inline json rat_json(const Rat& r) { return rat_to_string(r); }

inline json vec_json(const Vec<Rat>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rat_json(x));
  return out;
}

inline Vec<Rat> json_vec(const json& j) {
  if (!j.is_array()) throw IoError(IoErrorCode::schema, "expected array of rationals");
  Vec<Rat> v;
  for (const auto& x : j) v.push_back(json_rat(x));
  return v;
}

inline json gvec_json(const Vec<GRat>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"re", rat_json(x.re)}, {"im", rat_json(x.im)}});
  return out;
}

inline Vec<GRat> json_gvec(const json& j) {
  Vec<GRat> v;
  for (const auto& x : j) v.push_back(GRat(json_rat(x.at("re")), json_rat(x.at("im"))));
  return v;
}

inline json mat_json(const Mat<Rat>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(rat_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat<Rat> json_mat(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw IoError(IoErrorCode::dimension, "matrix row count mismatch");
  Mat<Rat> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw IoError(IoErrorCode::dimension, "matrix column count mismatch");
    for (int c = 0; c < cols; ++c) m(i, c) = json_rat(j[i][c]);
  }
  return m;
}

}  // namespace detail

inline json operator_to_json(const Operator& op) {
  json j;
  j["name"] = op.name();
  j["n"] = op.n();
  j["dimV"] = op.dim_v();
  j["dimW"] = op.dim_w();
  json coeffs = json::array();
  for (int i = 0; i < op.n(); ++i) coeffs.push_back(detail::mat_json(op.coeff(i)));
  j["coeffs"] = std::move(coeffs);
  if (!op.gram_is_identity()) j["gram"] = detail::mat_json(op.gram());
  return j;
}

struct LoadedOperator {
  Operator op;
  bool gram_defaulted = false;
};

inline LoadedOperator operator_from_json(const json& j) {
  for (const char* key : {"n", "dimV", "dimW", "coeffs"})
    if (!j.contains(key))
      throw IoError(IoErrorCode::schema, std::string("missing field '") + key + "'");
  if (!j["n"].is_number_integer() || !j["dimV"].is_number_integer() ||
      !j["dimW"].is_number_integer())
    throw IoError(IoErrorCode::schema, "n/dimV/dimW must be integers");
  int n = j["n"], nv = j["dimV"], mw = j["dimW"];
  if (!j["coeffs"].is_array() || static_cast<int>(j["coeffs"].size()) != n)
    throw IoError(IoErrorCode::dimension, "coeffs must list n matrices");
  std::vector<Mat<Rat>> coeffs;
  for (const auto& cm : j["coeffs"]) coeffs.push_back(detail::json_mat(cm, mw, nv));
  std::optional<Mat<Rat>> gram;
  bool defaulted = true;
  if (j.contains("gram")) {
    gram = detail::json_mat(j["gram"], mw, mw);
    defaulted = false;
  }
  std::string name = j.value("name", std::string{});
  try {
    return {Operator(n, nv, mw, std::move(coeffs), name, std::move(gram)), defaulted};
  } catch (const DimensionError& e) {
    throw IoError(IoErrorCode::dimension, e.what());
  } catch (const ValidationError& e) {
    throw IoError(IoErrorCode::schema, e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoErrorCode::file, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(IoErrorCode::file, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(IoErrorCode::file, "cannot write " + path);
  out << j.dump(2) << "\n";
}

inline LoadedOperator load_operator(const std::string& path) {
  return operator_from_json(read_json_file(path));
}

namespace detail {

inline const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::elliptic: return "elliptic";
    case Verdict::not_elliptic: return "not_elliptic";
    default: return "indeterminate";
  }
}
inline const char* rank_verdict_str(RankVerdict v) {
  switch (v) {
    case RankVerdict::constant_rank: return "constant_rank";
    case RankVerdict::not_constant_rank: return "not_constant_rank";
    default: return "indeterminate";
  }
}
inline const char* mixing_verdict_str(MixingVerdict v) {
  switch (v) {
    case MixingVerdict::holds: return "holds";
    case MixingVerdict::fails: return "fails";
    default: return "indeterminate";
  }
}

inline json ellipticity_json(const EllipticityCertificate& c) {
  json j;
  j["kind"] = std::string(1, c.kind);
  j["verdict"] = verdict_str(c.verdict);
  j["lower_bound"] = c.lower_bound;
  j["tol"] = c.tol;
  j["lipschitz"] = c.lipschitz;
  j["boxes_used"] = c.boxes_used;
  j["budget"] = c.budget;
  if (c.witness_xi) j["witness_xi"] = gvec_json(*c.witness_xi);
  if (c.witness_kernel) j["witness_kernel"] = gvec_json(*c.witness_kernel);
  if (c.float_candidate) j["float_candidate"] = *c.float_candidate;
  j["candidate_sigma"] = c.candidate_sigma;
  return j;
}

inline json rank_json(const RankCertificate& c) {
  json j;
  j["verdict"] = rank_verdict_str(c.verdict);
  j["r"] = c.r;
  j["minors_vacuous"] = c.minors_vacuous;
  j["minor_count"] = c.minor_count;
  j["minors_vanish"] = c.minors_vanish;
  j["sigma_r_lower"] = c.sigma_r_lower;
  j["lipschitz"] = c.lipschitz;
  j["boxes_used"] = c.boxes_used;
  if (c.generic_point) j["generic_point"] = vec_json(*c.generic_point);
  if (c.drop_point) {
    j["drop_point"] = vec_json(*c.drop_point);
    j["drop_rank"] = c.drop_rank;
  }
  return j;
}

inline json mixing_json(const MixingCertificate& c) {
  json j;
  j["verdict"] = mixing_verdict_str(c.verdict);
  j["certified"] = c.certified;
  j["sampled"] = c.sampled;
  j["sigma_s_lower"] = c.sigma_s_lower;
  if (c.verdict == MixingVerdict::holds) {
    json fam = json::array();
    for (size_t i = 0; i < c.hyperplane_normals.size(); ++i) {
      json e;
      e["normal"] = vec_json(c.hyperplane_normals[i]);
      json basis = json::array();
      for (const auto& b : c.subspace_bases[i]) basis.push_back(vec_json(b));
      e["span_basis"] = std::move(basis);
      fam.push_back(std::move(e));
    }
    j["family"] = std::move(fam);
  }
  if (c.surviving_w) j["surviving_w"] = vec_json(*c.surviving_w);
  return j;
}

inline json span_json(const SpectrumSpan& s) {
  json j;
  j["span_dim"] = s.span_dim;
  j["target_dim"] = s.target_dim;
  j["complete"] = s.complete;
  json triples = json::array();
  for (const auto& t : s.triples) {
    triples.push_back({{"w_star", vec_json(t.w_star)},
                       {"xi", vec_json(t.xi)},
                       {"v_star", vec_json(t.v_star)}});
  }
  j["triples"] = std::move(triples);
  return j;
}

inline json poly_json(const Poly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms())
    terms.push_back({{"m", m}, {"c", rat_json(c)}});
  return terms;
}

inline json kernel_json(const PolyKernel& k) {
  json j;
  j["d_max"] = k.d_max;
  j["dims"] = k.dims;
  if (k.stabilization_degree)
    j["stabilization_degree"] = *k.stabilization_degree;
  else
    j["stabilization_degree"] = "not stabilized";
  json basis = json::array();
  for (const auto& elem : k.basis) {
    json comps = json::array();
    for (const auto& p : elem) comps.push_back(poly_json(p));
    basis.push_back(std::move(comps));
  }
  j["basis"] = std::move(basis);
  return j;
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

/// Hash over the canonical dump with volatile fields removed.
inline std::string report_hash(json j) {
  j.erase("timestamp");
  j.erase("elapsed_seconds");
  j.erase("hash");
  return detail::fnv1a_hex(j.dump());
}

inline json report_to_json(const Report& rep, const std::string& timestamp = "") {
  json j;
  j["format_version"] = rep.format_version;
  j["operator"] = operator_to_json(rep.op);
  j["budget"] = {{"tol", rep.budget.tol},
                 {"max_boxes", rep.budget.max_boxes},
                 {"quality_gap", rep.budget.quality_gap}};
  j["r_elliptic"] = detail::ellipticity_json(rep.r_cert);
  j["c_elliptic"] = detail::ellipticity_json(rep.c_cert);
  j["constant_rank"] = detail::rank_json(rep.rank_cert);
  j["mixing"] = detail::mixing_json(rep.rank_one.mixing);
  j["spectrum_span"] = detail::span_json(rep.rank_one.span);
  j["kernel"] = detail::kernel_json(rep.kernel);
  j["consistent"] = rep.consistent;
  j["inconsistencies"] = rep.inconsistencies;
  j["elapsed_seconds"] = rep.elapsed_seconds;
  j["timestamp"] = timestamp;
  j["hash"] = report_hash(j);
  return j;
}

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

/// Re-derives the full report from the embedded operator and budget and
/// compares field by field; the pipeline is deterministic, so any mutated
/// value disagrees. Unknown top-level fields are ignored with a warning.
inline VerifyResult verify_report_json(const json& cert) {
  VerifyResult res;
  if (!cert.contains("operator") || !cert.contains("budget")) {
    res.ok = false;
    res.failures.push_back("certificate missing operator or budget");
    return res;
  }
  json expected;
  try {
    Operator op = operator_from_json(cert["operator"]).op;
    CertifyBudget budget;
    budget.tol = cert["budget"].value("tol", budget.tol);
    budget.max_boxes = cert["budget"].value("max_boxes", budget.max_boxes);
    budget.quality_gap = cert["budget"].value("quality_gap", budget.quality_gap);

    // The pipeline is deterministic, so re-derivations can be memoized on
    // the exact operator + budget pair; mutation sweeps then re-classify once.
    static std::map<std::string, json> memo;
    std::string memo_key =
        cert["operator"].dump() + "|" + cert["budget"].dump();
    auto it = memo.find(memo_key);
    if (it == memo.end())
      it = memo.emplace(memo_key, report_to_json(classify(op, budget))).first;
    expected = it->second;
  } catch (const std::exception& e) {
    res.ok = false;
    res.failures.push_back(std::string("cannot re-derive report: ") + e.what());
    return res;
  }
  json given = cert;
  for (const char* volatile_key : {"timestamp", "elapsed_seconds", "hash"}) {
    expected.erase(volatile_key);
    given.erase(volatile_key);
  }
  // unknown future fields: warn and drop
  for (auto it = given.begin(); it != given.end();) {
    if (!expected.contains(it.key())) {
      res.warnings.push_back("ignoring unknown field '" + it.key() + "'");
      it = given.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& [key, val] : expected.items()) {
    if (!given.contains(key)) {
      res.ok = false;
      res.failures.push_back("missing field '" + key + "'");
    } else if (given[key] != val) {
      res.ok = false;
      res.failures.push_back("field '" + key + "' does not match re-derivation");
    }
  }
  if (cert.contains("hash") && cert["hash"] != report_hash(cert)) {
    res.ok = false;
    res.failures.push_back("stored hash does not match content");
  }
  return res;
}

/// Field files: CSV of per-cell values (row-major cells, dimV columns)
/// plus a JSON sidecar <path>.json with the domain description.
inline void save_field(const GridField& field, const std::string& csv_path) {
  const GridDomain& dom = *field.domain;
  std::ofstream out(csv_path);
  if (!out) throw IoError(IoErrorCode::file, "cannot write " + csv_path);
  char buf[32];
  for (long c = 0; c < dom.cell_count(); ++c) {
    for (int j = 0; j < field.dim_v; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.at(c, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  json side;
  side["kind"] = dom.kind == DomainKind::box ? "box" : "graph";
  side["n"] = dom.n;
  side["h"] = dom.h;
  side["lo"] = dom.lo;
  side["hi"] = dom.hi;
  side["shape"] = dom.shape;
  side["dimV"] = field.dim_v;
  if (dom.kind == DomainKind::graph) {
    side["graph_samples"] = dom.graph_samples;
    side["lipschitz"] = dom.lipschitz;
  }
  write_json_file(csv_path + ".json", side);
}

inline GridField load_field(const std::string& csv_path) {
  json side = read_json_file(csv_path + ".json");
  for (const char* key : {"kind", "n", "h", "lo", "hi", "dimV"})
    if (!side.contains(key))
      throw IoError(IoErrorCode::schema, std::string("sidecar missing '") + key + "'");
  int n = side["n"];
  double h = side["h"];
  std::vector<double> lo = side["lo"], hi = side["hi"];
  GridDomain dom;
  if (side["kind"] == "box") {
    dom = GridDomain::box(n, h, lo, hi);
  } else if (side["kind"] == "graph") {
    std::vector<double> samples = side.at("graph_samples").get<std::vector<double>>();
    size_t next = 0;
    dom = GridDomain::graph(n, h, lo, hi, [&](const std::vector<double>&) {
      return samples.at(next++ % samples.size());
    });
    // graph() resamples in row-major base order, matching the stored order
  } else {
    throw IoError(IoErrorCode::schema, "kind must be box or graph");
  }
  if (side.contains("shape") && dom.shape != side["shape"].get<std::vector<int>>())
    throw IoError(IoErrorCode::dimension, "sidecar shape inconsistent with extent/h");

  GridField field(std::make_shared<GridDomain>(std::move(dom)), side["dimV"]);
  std::ifstream in(csv_path);
  if (!in) throw IoError(IoErrorCode::file, "cannot open " + csv_path);
  std::string line;
  long cell = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (cell >= field.domain->cell_count())
      throw IoError(IoErrorCode::dimension, "too many CSV rows for the domain");
    std::stringstream ss(line);
    std::string tok;
    int j = 0;
    while (std::getline(ss, tok, ',')) {
      if (j >= field.dim_v)
        throw IoError(IoErrorCode::dimension, "too many CSV columns for dimV");
      field.at(cell, j++) = std::stod(tok);
    }
    if (j != field.dim_v)
      throw IoError(IoErrorCode::dimension, "too few CSV columns for dimV");
    ++cell;
  }
  if (cell != field.domain->cell_count())
    throw IoError(IoErrorCode::dimension, "CSV row count does not match the domain");
  return field;
}

}  // namespace opcert
