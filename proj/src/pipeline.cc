// Copyright 2026 The kftomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kftomo/pipeline.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "kftomo/confidence.h"
#include "kftomo/error.h"
#include "kftomo/models.h"
#include "kftomo/restrict.h"
#include "kftomo/rng.h"
#include "kftomo/simulate.h"
#include "kftomo/stats.h"

namespace kftomo::pipeline {

using io::Json;

namespace {

Error in_setting(const Error& e, std::size_t i) {
  return Error(e.code(), "setting " + std::to_string(i) + ": " + e.detail());
}

bool informationally_complete(const MeasurementSetting& s, int k_x) {
  Eigen::JacobiSVD<CMatrix> svd(s.h_tilde);
  const RVector sv = svd.singularValues();
  if (sv.size() < k_x || sv(0) <= 0.0) return false;
  return sv(k_x - 1) > 1e-10 * sv(0);
}

// CW settings pooled into one, when that makes a scalar-complete measurement.
std::optional<std::pair<MeasurementSetting, OutcomeRecord>> pooled_cw(const Problem& p) {
  if (p.dataset.problem != io::ProblemKind::kState || p.settings.size() < 2) return std::nullopt;
  std::vector<CMatrix> povm;
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < p.settings.size(); ++i) {
    if (p.records[i].mode != Mode::kCW) return std::nullopt;
    povm.insert(povm.end(), p.settings[i].povm.begin(), p.settings[i].povm.end());
    counts.insert(counts.end(), p.records[i].counts.begin(), p.records[i].counts.end());
  }
  MeasurementSetting s = build_setting(povm, *p.constraints);
  if (!s.scalar_complete()) return std::nullopt;
  return std::make_pair(std::move(s), cw_record(std::move(counts)));
}

Json state_value(const Problem& p, const CVector& x) {
  if (p.dataset.problem == io::ProblemKind::kState) return io::matrix_to_json(mat(x));
  return io::rvector_to_json(x.real());
}

CVector state_from_json(const Problem& p, const Json& j, const std::string& where) {
  if (p.dataset.problem == io::ProblemKind::kState) return vec(io::matrix_from_json(j, where));
  return io::rvector_from_json(j, where).cast<Complex>();
}

const Json& section(const Json& report, const char* key) {
  if (!report.contains(key)) {
    throw MissingStage(std::string("report has no '") + key + "' section");
  }
  return report.at(key);
}

void note_stage(Json& report, const std::string& stage, Json flags) {
  report["provenance"]["stages"].push_back(Json{{"stage", stage}, {"flags", std::move(flags)}});
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

CVector unit(int n, int i) {
  CVector e = CVector::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace

const char* method_name(RestrictMethod m) { return m == RestrictMethod::kSimple ? "simple" : "kalman"; }

const char* cost_name(CostKind k) {
  switch (k) {
    case CostKind::kSmoothness: return "smoothness";
    case CostKind::kNegEntropy: return "entropy";
    case CostKind::kCustomQuadratic: return "quadratic";
  }
  return "unknown";
}

Problem build_problem(const io::Dataset& dataset) {
  Problem p;
  p.dataset = dataset;
  if (dataset.problem == io::ProblemKind::kState) {
    const int d = dataset.dimension;
    p.constraints = std::make_shared<const ConstraintSubspaces>(
        standard_state_constraints(d, CMatrix::Identity(d, d) / static_cast<double>(d)));
    p.spec.kind = PsdTraceOneSet{d};
  } else {
    p.constraints = std::make_shared<const ConstraintSubspaces>(models::diagonal_constraints(dataset.family));
    p.spec = models::diagonal_physical_set(dataset.family);
  }
  for (std::size_t i = 0; i < dataset.settings.size(); ++i) {
    const auto& s = dataset.settings[i];
    try {
      if (dataset.problem == io::ProblemKind::kState) {
        p.settings.push_back(build_setting(s.povm, *p.constraints));
      } else {
        p.settings.push_back(models::diagonal_setting(dataset.family, s.probe_weights, *p.constraints));
      }
    } catch (const Error& e) {
      throw in_setting(e, i);
    }
    p.records.push_back(s.record);
  }
  return p;
}

Json new_report(const io::Dataset& dataset, const Options& opts) {
  Json r;
  r["format"] = io::kReportFormat;
  r["provenance"] = Json{{"tool", "kftomo"},
                         {"version", kVersion},
                         {"source", opts.source},
                         {"seed", opts.seed},
                         {"conservative", opts.conservative},
                         {"stages", Json::array()}};
  r["dataset"] = io::dataset_to_json(dataset);
  return r;
}

Json load_report(const Json& j, const Options& opts) {
  if (!j.is_object() || !j.contains("format") || !j.at("format").is_string()) {
    throw io::ParseError("input: missing 'format' field");
  }
  const std::string f = j.at("format").get<std::string>();
  if (f == io::kDatasetFormat) return new_report(io::parse_dataset(j), opts);
  if (f == io::kReportFormat) {
    if (!j.contains("dataset")) throw io::ParseError("report: missing 'dataset' section");
    io::parse_dataset(j.at("dataset"));
    return j;
  }
  throw io::ParseError("input: unknown format '" + f + "'");
}

Problem problem_of(const Json& report) { return build_problem(io::parse_dataset(section(report, "dataset"))); }

GaussianState posterior_of(const Json& report, const Problem& problem) {
  const Json& rec = section(report, "reconstruct");
  GaussianState st;
  st.constraints = problem.constraints;
  st.mu_tilde = io::cvector_from_json(rec.at("mu_tilde"), "reconstruct.mu_tilde");
  st.sigma_tilde = io::matrix_from_json(rec.at("sigma_tilde"), "reconstruct.sigma_tilde");
  st.prior_b = rec.at("prior_b").is_null() ? std::numeric_limits<double>::infinity()
                                           : rec.at("prior_b").get<double>();
  if (st.mu_tilde.size() != problem.constraints->k_x() ||
      st.sigma_tilde.rows() != problem.constraints->k_x()) {
    throw io::ParseError("reconstruct: posterior size does not match the dataset");
  }
  return st;
}

StageStatus reconstruct(Json& report, const Options& opts) {
  StageStatus status;
  if (report.contains("reconstruct")) {
    status.skipped = true;
    return status;
  }
  const Problem p = problem_of(report);
  const int k = p.constraints->k_x();
  Json warnings = Json::array();
  GaussianState st;
  std::string method;

  std::optional<std::pair<MeasurementSetting, OutcomeRecord>> single;
  if (p.settings.size() == 1 && p.settings[0].scalar_complete() &&
      informationally_complete(p.settings[0], k)) {
    single.emplace(p.settings[0], p.records[0]);
  } else if (auto pooled = pooled_cw(p); pooled && informationally_complete(pooled->first, k)) {
    single = std::move(pooled);
  }
  if (single) {
    method = "single-shot";
    st = single_shot_posterior(p.constraints, single->first, single->second);
  } else {
    method = "kalman";
    st = init_prior(p.constraints, 1.0);
    for (std::size_t i = 0; i < p.settings.size(); ++i) {
      if (p.records[i].mode == Mode::kCW && !p.settings[i].scalar_complete()) {
        warnings.push_back("setting " + std::to_string(i) +
                           ": CW elements do not sum to a multiple of the identity; "
                           "moments use the non-POVM count model");
      }
      try {
        st = kalman_update(st, p.settings[i], p.records[i]);
      } catch (const Error& e) {
        throw in_setting(e, i);
      }
    }
    if (opts.correct_prior) {
      st = correct_prior(st, st.prior_b);
      st.prior_b = std::numeric_limits<double>::infinity();
      method += "+corrected";
    } else if (opts.variance_cap) {
      const double bp = variance_cap_b_prime(st.prior_b, *opts.variance_cap);
      st = correct_prior(st, bp);
      st.prior_b = 1.0 / (1.0 / st.prior_b - 1.0 / bp);
      method += "+capped";
    }
  }

  const int nu = k;
  const double gamma = gamma_nu(nu, opts.conservative);
  const CVector mean = st.mean();
  Json r;
  r["method"] = method;
  r["prior_b"] = std::isfinite(st.prior_b) ? Json(st.prior_b) : Json(nullptr);
  r["mean"] = state_value(p, mean);
  r["mu_tilde"] = io::cvector_to_json(st.mu_tilde);
  r["sigma_tilde"] = io::matrix_to_json(st.sigma_tilde);
  r["x0"] = io::cvector_to_json(p.constraints->x0);
  r["x1"] = io::matrix_to_json(p.constraints->x1);
  r["spectrum"] = io::rvector_to_json(covariance_spectrum(st));
  r["nu"] = nu;
  r["gamma"] = gamma;
  r["conservative"] = opts.conservative;
  if (p.dataset.problem == io::ProblemKind::kState) r["trace"] = mat(mean).trace().real();
  if (p.dataset.truth) {
    const double m2 = mahalanobis_sq_vector(st, *p.dataset.truth);
    r["truth_m2"] = m2;
    r["truth_inside"] = m2 <= gamma;
  }
  r["warnings"] = std::move(warnings);
  report["reconstruct"] = std::move(r);
  note_stage(report, "reconstruct",
             Json{{"conservative", opts.conservative},
                  {"correct_prior", opts.correct_prior},
                  {"variance_cap", opts.variance_cap ? Json(*opts.variance_cap) : Json(nullptr)}});
  return status;
}

StageStatus restrict(Json& report, RestrictMethod method, const Options& opts) {
  StageStatus status;
  const char* name = method_name(method);
  section(report, "reconstruct");
  const double gamma = report["reconstruct"].at("gamma").get<double>();
  if (report.contains("restrict") && report["restrict"].contains(name)) {
    status.skipped = true;
  } else {
    const Problem p = problem_of(report);
    const GaussianState post = posterior_of(report, p);
    PhysicalSetSpec spec = p.spec;
    spec.epsilon = opts.epsilon;
    Json r;
    double m2_ml = 0.0;
    if (method == RestrictMethod::kSimple) {
      const MaxLikResult ml = maxlik_state(post, spec);
      m2_ml = ml.m2_ml;
      r["x_ml"] = state_value(p, ml.x_ml);
      r["iterations"] = ml.iterations;
      r["kkt_residual"] = maxlik_kkt_residual(post, spec, ml.x_ml);
    } else {
      RestrictOptions ro;
      ro.seed = opts.seed;
      const RestrictionResult res = restrict_state(post, spec, ro);
      m2_ml = res.m2_ml;
      r["x_ml"] = state_value(p, res.x_ml);
      r["mean"] = state_value(p, res.state.mean());
      r["mu_tilde"] = io::cvector_to_json(res.state.mu_tilde);
      r["sigma_tilde"] = io::matrix_to_json(res.state.sigma_tilde);
      r["spectrum"] = io::rvector_to_json(covariance_spectrum(res.state));
      r["steps"] = res.iterations;
      r["sweeps"] = res.sweeps;
      r["converged"] = res.converged;
      r["min_ratio"] = res.min_ratio;
      r["epsilon"] = opts.epsilon;
      r["seed"] = opts.seed;
    }
    r["m2_ml"] = m2_ml;
    r["gamma"] = gamma;
    r["gamma_phys"] = physical_gamma(gamma, std::sqrt(m2_ml));
    r["inside"] = m2_ml <= gamma;
    if (m2_ml > gamma) {
      r["diagnostic"] =
          "the maximum-likelihood physical state lies outside the confidence region "
          "(M^2 = " + fmt(m2_ml) + " > gamma = " + fmt(gamma) +
          "); this indicates that something has gone wrong: the measurement model, "
          "calibration or stationarity assumptions do not describe the data";
    }
    report["restrict"][name] = std::move(r);
    note_stage(report, std::string("restrict/") + name,
               Json{{"epsilon", opts.epsilon}, {"seed", opts.seed}});
  }
  const Json& r = report["restrict"][name];
  if (!r.at("inside").get<bool>()) {
    status.exit_code = kExitOutsideRegion;
    status.message = r.at("diagnostic").get<std::string>();
  }
  return status;
}

StageStatus regularize(Json& report, CostKind kind, const Options& opts) {
  (void)opts;
  StageStatus status;
  section(report, "reconstruct");
  if (!report.contains("restrict") || report["restrict"].empty()) {
    throw MissingStage("no restrict stage in the report; run 'kftomo restrict' first");
  }
  const char* name = cost_name(kind);
  if (report.contains("regularize") && report["regularize"].contains(name)) {
    status.skipped = true;
    return status;
  }
  const Problem p = problem_of(report);
  const GaussianState post = posterior_of(report, p);
  const Json& restricted = report["restrict"].contains("kalman") ? report["restrict"]["kalman"]
                                                                  : report["restrict"]["simple"];
  MaxLikResult ml;
  ml.x_ml = state_from_json(p, restricted.at("x_ml"), "restrict.x_ml");
  ml.m2_ml = restricted.at("m2_ml").get<double>();
  const double gamma_phys = restricted.at("gamma_phys").get<double>();

  CostFunctional cost;
  if (kind == CostKind::kSmoothness) {
    cost = p.dataset.problem == io::ProblemKind::kState
               ? CostFunctional::smoothness(1, p.dataset.dimension)
               : CostFunctional::smoothness(p.dataset.family.elements, p.dataset.family.depth);
  } else if (kind == CostKind::kNegEntropy) {
    cost = CostFunctional::neg_entropy();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "custom costs are not available from a report");
  }

  const RegularizedResult res = regularized_solution(post, p.spec, cost, gamma_phys, ml);
  Json r;
  r["x"] = state_value(p, res.x);
  r["cost"] = res.cost;
  r["m2"] = res.m2;
  r["gamma_phys"] = gamma_phys;
  r["gap"] = res.gap;
  r["newton_steps"] = res.newton_steps;
  r["anchored"] = res.anchored;
  r["cost_ml"] = evaluate_cost(cost, p.spec, ml.x_ml);
  if (restricted.contains("mean")) {
    r["cost_restricted_mean"] =
        evaluate_cost(cost, p.spec, state_from_json(p, restricted.at("mean"), "restrict.mean"));
  }
  if (p.spec.is_psd()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(mat(res.x)), Eigen::EigenvaluesOnly);
    r["eigenvalues"] = io::rvector_to_json(es.eigenvalues());
  }
  report["regularize"][name] = std::move(r);
  note_stage(report, std::string("regularize/") + name, Json::object());
  return status;
}

std::string errorbars_csv(const Json& report) {
  const Problem p = problem_of(report);
  const GaussianState post = posterior_of(report, p);
  std::ostringstream os;
  os << std::setprecision(17);
  if (p.dataset.problem == io::ProblemKind::kState) {
    const int d = p.dataset.dimension;
    os << "i,j,part,mean,stddev\n";
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        CMatrix re = CMatrix::Zero(d, d);
        re(i, j) += 0.5;
        re(j, i) += 0.5;
        const ErrorBar er = operator_error_bar(post, re);
        os << i << ',' << j << ",re," << er.mean << ',' << er.stddev << '\n';
        if (i == j) continue;
        CMatrix im = CMatrix::Zero(d, d);
        im(i, j) = Complex(0.0, 0.5);
        im(j, i) = Complex(0.0, -0.5);
        const ErrorBar ei = operator_error_bar(post, im);
        os << i << ',' << j << ",im," << ei.mean << ',' << ei.stddev << '\n';
      }
    }
  } else {
    const auto& fam = p.dataset.family;
    os << "element,n,mean,stddev\n";
    for (int k = 0; k < fam.elements; ++k) {
      for (int n = 0; n < fam.depth; ++n) {
        const ErrorBar e = functional_error_bar(post, unit(fam.size(), k * fam.depth + n));
        os << k << ',' << n << ',' << e.mean << ',' << e.stddev << '\n';
      }
    }
  }
  return os.str();
}

std::string slice_csv(const Json& report, const std::string& which, int points) {
  const Problem p = problem_of(report);
  const GaussianState post = posterior_of(report, p);
  const int nu = report.at("reconstruct").at("nu").get<int>();
  const double g95 = report.at("reconstruct").at("gamma").get<double>();
  const double g50 = chi2_quantile(0.5, nu);
  const CVector mean = post.mean();

  int i1 = 0;
  int i2 = 1;
  if (which != "auto") {
    const auto comma = which.find(',');
    if (comma == std::string::npos) throw io::ParseError("--slice expects 'auto' or 'i,j'");
    try {
      i1 = std::stoi(which.substr(0, comma));
      i2 = std::stoi(which.substr(comma + 1));
    } catch (const std::exception&) {
      throw io::ParseError("--slice expects 'auto' or 'i,j'");
    }
  }
  CVector a1;
  CVector a2;
  std::string label1;
  std::string label2;
  if (p.dataset.problem == io::ProblemKind::kState) {
    const int d = p.dataset.dimension;
    if (i1 < 0 || i2 < 0 || i1 >= d || i2 >= d || i1 == i2) throw io::ParseError("--slice indices out of range");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(mat(mean)));
    const CVector v1 = es.eigenvectors().col(i1);
    const CVector v2 = es.eigenvectors().col(i2);
    a1 = vec(v1 * v1.adjoint());
    a2 = vec(v2 * v2.adjoint());
    label1 = "eig" + std::to_string(i1);
    label2 = "eig" + std::to_string(i2);
  } else {
    const int n = p.dataset.family.size();
    if (which == "auto") {
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = i;
      std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(),
                        [&](int a, int b) { return mean(a).real() < mean(b).real(); });
      i1 = idx[0];
      i2 = idx[1];
    }
    if (i1 < 0 || i2 < 0 || i1 >= n || i2 >= n || i1 == i2) throw io::ParseError("--slice indices out of range");
    a1 = unit(n, i1);
    a2 = unit(n, i2);
    label1 = "x" + std::to_string(i1);
    label2 = "x" + std::to_string(i2);
  }
  std::ostringstream os;
  os << std::setprecision(17);
  os << "contour,gamma,axis1,axis2,x,y\n";
  for (const auto& [level, g] : {std::pair{50, g50}, std::pair{95, g95}}) {
    for (const auto& [x, y] : slice_ellipse_functional(post, a1, a2, g, points)) {
      os << level << ',' << g << ',' << label1 << ',' << label2 << ',' << x << ',' << y << '\n';
    }
  }
  return os.str();
}

namespace {

[[noreturn]] void bad_spec(const std::string& what) { throw io::ParseError("simulation spec: " + what); }

double spec_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad_spec(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

// Each probability scaled by an independent factor in [1 - drift, 1 + drift].
RVector drifted(RVector p, double drift, Rng& rng) {
  if (drift <= 0.0) return p;
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) *= 1.0 + drift * (2.0 * rng.uniform() - 1.0);
  return p;
}

CMatrix spec_state(const Json& j, int dim, const CMatrix& fallback) {
  if (!j.contains("state")) return fallback;
  const Json& s = j.at("state");
  if (s.is_string()) {
    if (s.get<std::string>() == "bell" && dim == 4) return models::bell_state();
    bad_spec("unknown named state '" + s.get<std::string>() + "'");
  }
  CMatrix rho = io::matrix_from_json(s, "spec.state");
  if (rho.rows() != dim || rho.cols() != dim) bad_spec("state has the wrong dimension");
  return rho;
}

io::DatasetSetting state_setting(std::string name, std::vector<CMatrix> povm, OutcomeRecord rec) {
  io::DatasetSetting s;
  s.name = std::move(name);
  s.povm = std::move(povm);
  s.record = std::move(rec);
  return s;
}

}  // namespace

io::Dataset simulate(const Json& spec, std::uint64_t seed) {
  if (!spec.is_object()) bad_spec("top level must be an object");
  if (!spec.contains("format") || spec.at("format") != io::kSimSpecFormat) {
    bad_spec(std::string("'format' must be '") + io::kSimSpecFormat + "'");
  }
  if (!spec.contains("preset") || !spec.at("preset").is_string()) bad_spec("missing 'preset'");
  const std::string preset = spec.at("preset").get<std::string>();
  const double drift = spec_number(spec, "drift", 0.0);
  Rng rng(seed);
  Rng drift_rng = Rng::stream(seed, 0xd71f7ULL);
  io::Dataset ds;
  ds.metadata["preset"] = preset;
  ds.metadata["seed"] = std::to_string(seed);
  if (drift > 0.0) ds.metadata["drift"] = fmt(drift);

  if (preset == "pauli" || preset == "random") {
    const int dim = preset == "pauli" ? 2 : static_cast<int>(spec_number(spec, "dimension", 2));
    if (dim < 2) bad_spec("dimension must be at least 2");
    const auto runs = static_cast<std::int64_t>(spec_number(spec, "runs", 1000));
    if (runs < 1) bad_spec("runs must be positive");
    CMatrix rho;
    std::vector<std::vector<CMatrix>> povms;
    if (preset == "pauli") {
      rho = CMatrix::Identity(2, 2) / 2.0;
      if (spec.contains("bloch")) {
        const RVector r = io::rvector_from_json(spec.at("bloch"), "spec.bloch");
        if (r.size() != 3 || r.norm() > 1.0 + 1e-12) bad_spec("'bloch' must be a 3-vector of norm <= 1");
        CMatrix x(2, 2), y(2, 2), z(2, 2);
        x << 0, 1, 1, 0;
        y << 0, Complex(0, -1), Complex(0, 1), 0;
        z << 1, 0, 0, -1;
        rho += (r(0) * x + r(1) * y + r(2) * z) / 2.0;
      }
      rho = spec_state(spec, 2, rho);
      povms = models::pauli_settings();
    } else {
      const int rank = static_cast<int>(spec_number(spec, "rank", dim));
      if (rank < 1 || rank > dim) bad_spec("rank must lie in [1, dimension]");
      rho = spec_state(spec, dim, models::random_density(dim, rank, rng));
      const int bases = static_cast<int>(spec_number(spec, "bases", dim + 1));
      if (bases < 1) bad_spec("bases must be positive");
      for (int b = 0; b < bases; ++b) {
        const CMatrix u = haar_unitary(dim, rng);
        std::vector<CMatrix> povm;
        for (int c = 0; c < dim; ++c) povm.push_back(u.col(c) * u.col(c).adjoint());
        povms.push_back(std::move(povm));
      }
    }
    ds.problem = io::ProblemKind::kState;
    ds.dimension = dim;
    for (std::size_t s = 0; s < povms.size(); ++s) {
      RVector pr = drifted(born_probabilities(rho, povms[s]), drift, drift_rng);
      pr = pr.cwiseMax(0.0);
      pr /= pr.sum();
      ds.settings.push_back(state_setting((preset == "pauli" ? std::string(1, "XYZ"[s % 3])
                                                             : "basis" + std::to_string(s)),
                                          povms[s], sample_pulsed(pr, runs, rng)));
    }
    ds.truth = vec(rho);
  } else if (preset == "two-qubit" || preset == "bell") {
    const CMatrix rho = spec_state(spec, 4, models::bell_state());
    const double total = spec_number(spec, "total_counts", 1e6);
    if (!(total > 0.0)) bad_spec("total_counts must be positive");
    const auto proj = models::two_qubit_projectors();
    const auto labels = models::two_qubit_labels();
    // The 36 projectors sum to 9 times the identity.
    const double brightness = total / 9.0;
    ds.problem = io::ProblemKind::kState;
    ds.dimension = 4;
    for (std::size_t s = 0; s < proj.size(); ++s) {
      const RVector pr = drifted(born_probabilities(rho, {proj[s]}), drift, drift_rng);
      ds.settings.push_back(state_setting(labels[s], {proj[s]}, sample_cw(pr, brightness, rng)));
    }
    ds.truth = vec(rho);
  } else if (preset == "apd") {
    models::DiagonalFamily fam;
    const int detectors = static_cast<int>(spec_number(spec, "detectors", 8));
    fam.elements = detectors + 1;
    fam.depth = static_cast<int>(spec_number(spec, "depth", 20));
    const double eta = spec_number(spec, "eta", 0.6);
    const int probes = static_cast<int>(spec_number(spec, "probes", 60));
    const double a_min = spec_number(spec, "alpha_min", 0.4);
    const double a_max = spec_number(spec, "alpha_max", 3.0);
    const auto runs = static_cast<std::int64_t>(spec_number(spec, "runs", 38084));
    if (detectors < 1 || fam.depth < 2 || probes < 1 || runs < 1 || !(eta > 0.0 && eta <= 1.0) ||
        !(a_min > 0.0 && a_max >= a_min)) {
      bad_spec("invalid detector-bank parameters");
    }
    const RVector truth = models::detector_bank_truth(detectors, eta, fam.depth);
    const ConstraintSubspaces cs = models::diagonal_constraints(fam);
    ds.problem = io::ProblemKind::kDiagonalPovm;
    ds.family = fam;
    for (int q = 0; q < probes; ++q) {
      const double alpha = probes == 1 ? a_min : a_min + (a_max - a_min) * q / (probes - 1);
      io::DatasetSetting s;
      s.name = "alpha=" + fmt(alpha);
      s.probe_weights = models::coherent_weights(alpha, fam.depth);
      const MeasurementSetting ms = models::diagonal_setting(fam, s.probe_weights, cs);
      RVector pr = drifted(born_probabilities(truth.cast<Complex>(), ms), drift, drift_rng);
      pr = pr.cwiseMax(0.0);
      pr /= pr.sum();
      s.record = sample_pulsed(pr, runs, rng);
      ds.settings.push_back(std::move(s));
    }
    ds.truth = truth.cast<Complex>();
  } else {
    bad_spec("unknown preset '" + preset + "'");
  }
  return ds;
}

}  // namespace kftomo::pipeline
