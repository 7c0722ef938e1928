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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kftomo/confidence.h"
#include "kftomo/io.h"
#include "kftomo/kalman.h"
#include "kftomo/models.h"
#include "kftomo/physical.h"
#include "kftomo/pipeline.h"
#include "kftomo/restrict.h"
#include "kftomo/rng.h"
#include "kftomo/simulate.h"
#include "kftomo/special.h"
#include "kftomo/stats.h"
#include "oracles.h"

namespace {

using namespace kftomo;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }
double rel(const CVector& a, const CVector& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KFTOMO_CLI) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ConstraintsPtr qubit_constraints() {
  return std::make_shared<const ConstraintSubspaces>(
      standard_state_constraints(2, CMatrix::Identity(2, 2) / 2.0));
}

std::vector<MeasurementSetting> pauli(const ConstraintSubspaces& cs) {
  std::vector<MeasurementSetting> out;
  for (const auto& povm : models::pauli_settings()) out.push_back(build_setting(povm, cs));
  return out;
}

std::vector<OutcomeRecord> sample_all(const CMatrix& rho, const std::vector<MeasurementSetting>& s,
                                      std::int64_t runs, Rng& rng) {
  std::vector<OutcomeRecord> out;
  for (const auto& m : s) out.push_back(sample_pulsed(born_probabilities(rho, m.povm), runs, rng));
  return out;
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

void compositions(int n, int d, std::vector<std::int64_t>& cur, const std::function<void()>& visit) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(n);
    visit();
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= n; ++k) {
    cur.push_back(k);
    compositions(n - k, d, cur, visit);
    cur.pop_back();
  }
}

// d + 1 bases: the Pauli eigenbases for d = 2; for odd prime d the standard
// basis and columns omega^(a j^2 + b j) / sqrt(d), a = 0..d-1.
std::vector<CMatrix> mutually_unbiased_bases(int d) {
  std::vector<CMatrix> out{CMatrix::Identity(d, d)};
  if (d == 2) {
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix x(2, 2), y(2, 2);
    x << h, h, h, -h;
    y << h, h, Complex(0, h), Complex(0, -h);
    out.push_back(x);
    out.push_back(y);
    return out;
  }
  for (int a = 0; a < d; ++a) {
    CMatrix m(d, d);
    for (int b = 0; b < d; ++b) {
      for (int j = 0; j < d; ++j) {
        const double ph = 2.0 * M_PI * static_cast<double>((a * j * j + b * j) % d) / d;
        m(j, b) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), ph);
      }
    }
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const auto t0 = Clock::now();
  double worst_moment = 0.0;
  double worst_penrose = 0.0;
  int cases = 0;
  auto check = [&](const std::vector<std::int64_t>& f) {
    const OutcomeRecord rec = pulsed_record(f);
    const MeasurementMoments mm = dirichlet_moments(rec);
    const oracle::Moments ref = oracle::dirichlet_by_quadrature(f);
    worst_moment = std::max({worst_moment, (mm.mean - ref.mean).cwiseAbs().maxCoeff(),
                             (mm.covariance - ref.cov).cwiseAbs().maxCoeff()});
    const RMatrix& a = mm.covariance;
    const RMatrix ap = dirichlet_cov_mp_inverse(rec);
    // Penrose identities, each relative to the size of its reference term.
    const double e1 = (a * ap * a - a).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
    const double e2 = (ap * a * ap - ap).cwiseAbs().maxCoeff() / ap.cwiseAbs().maxCoeff();
    const RMatrix aap = a * ap;
    const RMatrix apa = ap * a;
    const double e3 = (aap - aap.transpose()).cwiseAbs().maxCoeff();
    const double e4 = (apa - apa.transpose()).cwiseAbs().maxCoeff();
    worst_penrose = std::max({worst_penrose, e1, e2, e3, e4});
    ++cases;
  };
  for (int d = 2; d <= 4; ++d) {
    for (int n = 0; n <= 12; ++n) {
      std::vector<std::int64_t> cur;
      compositions(n, d, cur, [&] { check(cur); });
    }
  }
  Rng rng(101);
  for (int c = 0; c < 100; ++c) {
    const int d = static_cast<int>(uniform_int(rng, 2, 6));
    const std::int64_t n = uniform_int(rng, 0, 200);
    std::vector<std::int64_t> f(d, 0);
    for (std::int64_t k = 0; k < n; ++k) ++f[static_cast<std::size_t>(uniform_int(rng, 0, d - 1))];
    check(f);
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst_moment <= 1e-8 && worst_penrose <= 1e-8 && secs < 30.0;
  v.detail = std::to_string(cases) + " cases, max moment error " + num(worst_moment) +
             ", max Penrose residual " + num(worst_penrose) + ", " + num(secs, 3) + " s";
  return v;
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  Rng rng(202);
  // Identity measurement on an unconstrained 3-dimensional space.
  auto free_space = std::make_shared<ConstraintSubspaces>();
  free_space->t_x = CMatrix::Identity(3, 3);
  free_space->x1 = CMatrix::Identity(3, 3);
  free_space->x0 = CVector::Zero(3);
  MeasurementSetting ident;
  ident.h = CMatrix::Identity(3, 3);
  ident.h_tilde = CMatrix::Identity(3, 3);
  ident.meas.t_z = CMatrix::Identity(3, 3);
  ident.meas.z1 = CMatrix::Identity(3, 3);
  ident.meas.z0 = CVector::Zero(3);
  double parallel = 0.0;
  for (int i = 0; i < 50; ++i) {
    RMatrix a(3, 3), b(3, 3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        a(r, c) = rng.normal();
        b(r, c) = rng.normal();
      }
    }
    const RMatrix sig = a * a.transpose() + 0.1 * RMatrix::Identity(3, 3);
    const RMatrix theta = b * b.transpose() + 0.1 * RMatrix::Identity(3, 3);
    GaussianState prior;
    prior.constraints = free_space;
    prior.mu_tilde = CVector::Zero(3);
    for (int k = 0; k < 3; ++k) prior.mu_tilde(k) = rng.normal();
    prior.sigma_tilde = sig.cast<Complex>();
    MeasurementMoments mm;
    mm.mean = RVector(3);
    for (int k = 0; k < 3; ++k) mm.mean(k) = rng.normal();
    mm.covariance = theta;
    const GaussianState post = kalman_update(prior, ident, mm);
    const RMatrix info = sig.inverse() + theta.inverse();
    const RMatrix expect = info.inverse();
    const RVector mu = expect * (sig.inverse() * prior.mu_tilde.real() + theta.inverse() * mm.mean);
    parallel = std::max({parallel, rel(post.sigma_tilde, expect.cast<Complex>()),
                         rel(post.mu_tilde, CVector(mu.cast<Complex>()))});
  }

  const ConstraintsPtr cs = qubit_constraints();
  const auto settings = pauli(*cs);
  double tilde_vs_proj = 0.0;
  double order = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CMatrix rho = models::random_density(2, 1 + static_cast<int>(i % 2), rng);
    const auto recs = sample_all(rho, settings, uniform_int(rng, 50, 2000), rng);
    GaussianState st = init_prior(cs, 1.0);
    st = kalman_update(st, settings[2], recs[2]);
    const GaussianState t = kalman_update(st, settings[0], recs[0]);
    const UntildedGaussian p =
        kalman_update_projector_form(UntildedGaussian{st.mean(), st.covariance()}, *cs, settings[0], recs[0]);
    tilde_vs_proj = std::max({tilde_vs_proj, (t.mean() - p.mean).cwiseAbs().maxCoeff(),
                              (t.covariance() - p.cov).cwiseAbs().maxCoeff()});
    const GaussianState xy = kalman_update(t, settings[1], recs[1]);
    const GaussianState yx = kalman_update(kalman_update(st, settings[1], recs[1]), settings[0], recs[0]);
    order = std::max({order, rel(xy.mu_tilde, yx.mu_tilde), rel(xy.sigma_tilde, yx.sigma_tilde)});
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = parallel <= 1e-10 && tilde_vs_proj <= 1e-8 && order <= 1e-9 && secs < 10.0;
  v.detail = "parallel-sum " + num(parallel) + ", tilde vs projector " + num(tilde_vs_proj) +
             ", order " + num(order) + ", " + num(secs, 3) + " s";
  return v;
}

Verdict criterion3() {
  const auto t0 = Clock::now();
  Rng rng(303);
  const ConstraintsPtr cs = qubit_constraints();
  const auto settings = pauli(*cs);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const CMatrix rho = models::random_density(2, 2, rng);
    const auto recs = sample_all(rho, settings, uniform_int(rng, 100, 5000), rng);
    GaussianState st = init_prior(cs, 1.0);
    for (std::size_t s = 0; s < settings.size(); ++s) st = kalman_update(st, settings[s], recs[s]);
    const GaussianState corrected = correct_prior(st, 1.0);
    const GaussianState ref = infinite_prior_posterior(cs, settings, recs);
    worst = std::max({worst, rel(corrected.mean(), ref.mean()), rel(corrected.sigma_tilde, ref.sigma_tilde)});
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst <= 1e-5 && secs < 10.0;
  v.detail = "max relative deviation " + num(worst) + ", " + num(secs, 3) + " s";
  return v;
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  const ConstraintsPtr cs = qubit_constraints();
  TrueModel model;
  RVector r(3);
  r << 0.3, -0.2, 0.5;
  model.x_true = vec(oracle::bloch_state(r));
  model.settings = pauli(*cs);
  model.mode = Mode::kPulsed;
  model.runs = 1000;
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const CoverageResult res = coverage_experiment(cs, model, 500, 20260415, false, jobs);
  const double q95 = chi2_quantile(0.95, 3);
  int inside = 0;
  double mean = 0.0;
  for (double m : res.m2) {
    inside += m <= q95 ? 1 : 0;
    mean += m;
  }
  mean /= static_cast<double>(res.m2.size());
  const double coverage = static_cast<double>(inside) / static_cast<double>(res.m2.size());
  const double band = 3.0 * std::sqrt(2.0 * 3.0 / 500.0) * std::sqrt(1.3);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = coverage >= 0.93 && coverage <= 0.985 && std::abs(mean - 3.0) <= band && secs < 60.0;
  v.detail = "coverage " + num(coverage) + " at chi2 quantile " + num(q95) + " (" + num(res.coverage) +
             " at gamma_nu), mean M^2 " + num(mean) + " vs 3 +- " + num(band) + ", " + num(secs, 3) + " s";
  return v;
}

Verdict criterion5() {
  Rng rng(505);
  int violations = 0;
  double worst = -1e300;
  for (int c = 0; c < 10000; ++c) {
    const int d = static_cast<int>(uniform_int(rng, 2, 6));
    const std::int64_t n = uniform_int(rng, 1, 200);
    RVector p(d);
    for (int i = 0; i < d; ++i) p(i) = -std::log(rng.uniform_open());
    p /= p.sum();
    const OutcomeRecord rec = sample_pulsed(p, n, rng);
    const MeasurementMoments mm = dirichlet_moments(rec);
    const RMatrix pinv = dirichlet_cov_mp_inverse(rec);
    RVector mode(d);
    for (int i = 0; i < d; ++i) mode(i) = static_cast<double>(rec.counts[i]) / static_cast<double>(n);
    const RVector dx = mode - mm.mean;
    const double m2 = dx.dot(pinv * dx);
    const double excess = m2 - mode_cr_bound(n, d);
    worst = std::max(worst, excess);
    if (excess > 1e-9) ++violations;
  }
  Verdict v;
  v.pass = violations == 0;
  v.detail = std::to_string(violations) + " violations in 10000 draws, max M^2 - bound " + num(worst);
  return v;
}

Verdict criterion6() {
  Rng rng(606);
  const std::int64_t n = 100;
  RVector p(2);
  p << 0.5, 0.5;
  const int draws = 100000;
  double s1 = 0.0, s2 = 0.0;
  std::vector<double> z(draws);
  for (int i = 0; i < draws; ++i) {
    const std::int64_t k = sample_binomial(n, 0.5, rng);
    z[i] = wald_statistic(p, {k, n - k});
    s1 += z[i];
  }
  const double mean = s1 / draws;
  double m4 = 0.0;
  for (double v : z) {
    s2 += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  const double var = s2 / (draws - 1);
  m4 /= draws;
  const double sd = std::sqrt(var);
  const double se_mean = sd / std::sqrt(static_cast<double>(draws));
  const double se_sd = std::sqrt((m4 - var * var) / draws) / (2.0 * sd);
  const WaldMoments wm = wald_moments(p, n);
  const double sd_model = std::sqrt(wm.sigma2_z);
  const bool mom_ok = std::abs(mean - wm.mu_z) <= 4.0 * se_mean && std::abs(sd - sd_model) <= 4.0 * se_sd;

  double best_p = 0.0, best_s = -1.0;
  for (int i = 1; i <= 2000; ++i) {
    const double q = 0.25 * i / 2000.0;
    RVector pq(2);
    pq << q, 1.0 - q;
    const double s = wald_moments(pq, n).sigma2_z;
    if (s > best_s) {
      best_s = s;
      best_p = q;
    }
  }
  const double peak = best_p * static_cast<double>(n);
  Verdict v;
  v.pass = mom_ok && peak >= 5.0 && peak <= 10.0;
  v.detail = "MC mean " + num(mean, 6) + " vs " + num(wm.mu_z, 6) + " (SE " + num(se_mean, 3) + "), MC sd " +
             num(sd, 6) + " vs " + num(sd_model, 6) + " (SE " + num(se_sd, 3) + "), sigma(Z) peak at pN = " +
             num(peak, 4);
  return v;
}

Verdict criterion7() {
  const auto t0 = Clock::now();
  auto space = std::make_shared<ConstraintSubspaces>();
  space->t_x = CMatrix::Identity(2, 2);
  space->x1 = CMatrix::Identity(2, 2);
  space->x0 = CVector::Zero(2);
  GaussianState st;
  st.constraints = space;
  st.mu_tilde = CVector(2);
  st.mu_tilde << -1.0, 2.0;
  st.sigma_tilde = CMatrix(2, 2);
  st.sigma_tilde << 1.0, -0.9, -0.9, 1.0;
  PhysicalSetSpec spec;
  spec.kind = coordinate_orthant(2);
  spec.epsilon = 0.003;
  RestrictOptions opts;
  opts.with_maxlik = false;
  const RestrictionResult res = restrict_orthant(st, spec, opts);
  const double alpha0 = 1.64485;
  double min_ratio = 1e300;
  for (int i = 0; i < 2; ++i) {
    const double r = res.state.mu_tilde(i).real() / std::sqrt(res.state.sigma_tilde(i, i).real());
    min_ratio = std::min(min_ratio, r);
  }
  const TruncatedNormal tn = truncated_normal_approx(-1.0, 1.0, spec.alpha0());
  const double s_ref = oracle::kl_constrained_sigma(-1.0, 1.0, spec.alpha0());
  const double err = std::max(std::abs(tn.sigma - s_ref), std::abs(tn.mu - spec.alpha0() * s_ref));
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = res.converged && min_ratio >= (1.0 - 0.003) * alpha0 && err <= 1e-4 && secs < 5.0;
  v.detail = std::string(res.converged ? "converged" : "NOT converged") + " after " +
             std::to_string(res.iterations) + " steps, min mu/sigma " + num(min_ratio, 6) +
             ", truncated-normal (mu, sigma) = (" + num(tn.mu, 6) + ", " + num(tn.sigma, 6) +
             ") vs KL oracle error " + num(err) + ", " + num(secs, 3) + " s";
  return v;
}

Verdict criterion8() {
  Rng rng(808);
  const ConstraintsPtr cs = qubit_constraints();
  const auto settings = pauli(*cs);
  PhysicalSetSpec spec;
  spec.kind = PsdTraceOneSet{2};
  const RealFrame frame = make_real_frame(*cs, spec);
  double worst = 0.0;
  long qualifying = 0;
  long bounded = 0;
  for (int i = 0; i < 50; ++i) {
    // Near-pure truths so that most posterior means are unphysical.
    const CMatrix pure = models::random_density(2, 1, rng);
    const CMatrix rho = 0.97 * pure + 0.03 * CMatrix::Identity(2, 2) / 2.0;
    const auto recs = sample_all(rho, settings, uniform_int(rng, 20, 60), rng);
    const GaussianState post = infinite_prior_posterior(cs, settings, recs);
    const MaxLikResult ml = maxlik_state(post, spec);
    const oracle::GridMin grid = oracle::bloch_grid_min(post, 0.002);
    worst = std::max(worst, std::abs(ml.m2_ml - grid.m2));

    RestrictOptions ro;
    ro.seed = static_cast<std::uint64_t>(i);
    const RestrictionResult rr = restrict_psd(post, spec, ro);
    const double gamma = gamma_nu(3, false);
    const double gamma_phys = physical_gamma(gamma, std::sqrt(ml.m2_ml));
    const RealGaussian g = real_gaussian(rr.state, frame);
    const Eigen::LLT<RMatrix> llt(g.cov);
    const RMatrix l = llt.matrixL();
    for (int k = 0; k < 1000; ++k) {
      RVector e(frame.k());
      for (int j = 0; j < frame.k(); ++j) e(j) = rng.normal();
      const CVector x = frame.to_full(g.mean + l * e);
      if (physicality_violation(spec, x) > 0.0) continue;
      if (mahalanobis_sq_vector(rr.state, x) > gamma) continue;
      ++qualifying;
      if (mahalanobis_sq_vector(post, x) <= gamma_phys) ++bounded;
    }
  }
  const double frac = qualifying ? static_cast<double>(bounded) / static_cast<double>(qualifying) : 0.0;
  Verdict v;
  v.pass = worst <= 1e-3 && qualifying > 0 && frac >= 0.99;
  v.detail = "max |M^2_ML - grid| " + num(worst) + ", physical-region bound holds for " + num(100.0 * frac, 5) +
             "% of " + std::to_string(qualifying) + " physical draws";
  return v;
}

Verdict criterion9() {
  namespace pl = pipeline;
  pl::Options opts;
  opts.seed = 9;
  const io::Json spec = {{"format", io::kSimSpecFormat}, {"preset", "two-qubit"}, {"total_counts", 1e6}};
  const io::Dataset ds = pl::simulate(spec, opts.seed);
  std::int64_t total = 0;
  for (const auto& s : ds.settings) {
    for (auto c : s.record.counts) total += c;
  }
  io::Json report = pl::new_report(ds, opts);
  const auto t0 = Clock::now();
  pl::reconstruct(report, opts);
  const double secs = seconds_since(t0);
  const pl::StageStatus st = pl::restrict(report, pl::RestrictMethod::kSimple, opts);
  const CMatrix x_ml = io::matrix_from_json(report["restrict"]["simple"]["x_ml"], "x_ml");
  CVector phi = CVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const double fidelity = (phi.adjoint() * x_ml * phi)(0).real();

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kftomo_acceptance_c9";
  fs::create_directories(dir);
  const std::string simspec = (dir / "drift.json").string();
  io::write_json_file(simspec, io::Json{{"format", io::kSimSpecFormat},
                                        {"preset", "two-qubit"},
                                        {"total_counts", 1e6},
                                        {"drift", 0.05}});
  const std::string dataset = (dir / "drift.dataset.json").string();
  const std::string rep = (dir / "drift.report.json").string();
  const int rc_sim = run_cli("--seed 9 simulate " + simspec);
  const int rc_rec = run_cli("reconstruct " + dataset);
  const int rc_res = run_cli("restrict " + rep);
  const io::Json drifted = io::read_json_file(rep);
  const double m2_drift = drifted["restrict"]["simple"]["m2_ml"].get<double>();
  const double gamma = drifted["reconstruct"]["gamma"].get<double>();

  Verdict v;
  v.pass = report["reconstruct"]["method"] == "single-shot" && secs < 1.0 && fidelity >= 0.99 &&
           st.exit_code == 0 && rc_sim == 0 && rc_rec == 0 && rc_res == 4;
  v.detail = std::to_string(ds.settings.size()) + " settings, " + std::to_string(total) + " counts, " +
             report["reconstruct"]["method"].get<std::string>() + " in " + num(secs, 3) + " s, F(rho_ML) " +
             num(fidelity, 6) + "; drift: M^2_ML " + num(m2_drift) + " vs gamma " + num(gamma) + ", exit " +
             std::to_string(rc_res);
  return v;
}

Verdict criterion10() {
  namespace pl = pipeline;
  pl::Options opts;
  opts.seed = 10;
  const io::Json spec = {{"format", io::kSimSpecFormat}, {"preset", "apd"}, {"runs", 38084}};
  const io::Dataset ds = pl::simulate(spec, opts.seed);
  io::Json report = pl::new_report(ds, opts);
  const auto t0 = Clock::now();
  pl::reconstruct(report, opts);
  pl::restrict(report, pl::RestrictMethod::kKalman, opts);
  pl::regularize(report, CostKind::kSmoothness, opts);
  const double secs = seconds_since(t0);
  const io::Json& reg = report["regularize"]["smoothness"];
  const double after = reg["cost"].get<double>();
  const double before = reg["cost_restricted_mean"].get<double>();
  const RVector spectrum = io::rvector_from_json(report["reconstruct"]["spectrum"], "spectrum");
  const double decades = std::log10(spectrum.maxCoeff() / spectrum.minCoeff());
  Verdict v;
  v.pass = secs < 600.0 && after <= before && decades > 4.0;
  v.detail = std::to_string(ds.family.elements) + " elements x " + std::to_string(ds.family.depth) + " levels, " +
             std::to_string(ds.settings.size()) + " probes, pipeline " + num(secs, 4) + " s, smoothness " +
             num(before, 6) + " -> " + num(after, 6) + ", spectrum spans " + num(decades, 3) + " decades";
  return v;
}

Verdict criterion11() {
  Rng rng(1111);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 20; ++i) {
    const int dim = i % 2 ? 3 : 2;
    const ConstraintsPtr cs = std::make_shared<const ConstraintSubspaces>(
        standard_state_constraints(dim, CMatrix::Identity(dim, dim) / static_cast<double>(dim)));
    // A complete set of mutually unbiased bases in a random orientation.
    const CMatrix rot = haar_unitary(dim, rng);
    std::vector<MeasurementSetting> settings;
    for (const CMatrix& basis : mutually_unbiased_bases(dim)) {
      const CMatrix u = rot * basis;
      std::vector<CMatrix> povm;
      for (int c = 0; c < dim; ++c) povm.push_back(u.col(c) * u.col(c).adjoint());
      settings.push_back(build_setting(povm, *cs));
    }
    const CMatrix rho = models::random_density(dim, dim, rng);
    const auto recs = sample_all(rho, settings, uniform_int(rng, 200, 2000), rng);
    std::vector<OutcomeRecord> doubled;
    for (const auto& r : recs) {
      std::vector<std::int64_t> f = r.counts;
      for (auto& c : f) c *= 2;
      doubled.push_back(pulsed_record(f));
    }
    GaussianState a = init_prior(cs, 1.0);
    GaussianState b = init_prior(cs, 1.0);
    for (std::size_t s = 0; s < settings.size(); ++s) {
      a = kalman_update(a, settings[s], recs[s]);
      b = kalman_update(b, settings[s], doubled[s]);
    }
    const RVector ea = covariance_spectrum(a);
    const RVector eb = covariance_spectrum(b);
    const RVector ratio = eb.cwiseQuotient(ea);
    lo = std::min(lo, ratio.minCoeff());
    hi = std::max(hi, ratio.maxCoeff());
  }
  Verdict v;
  v.pass = lo >= 0.45 && hi <= 0.55;
  v.detail = "eigenvalue ratios in [" + num(lo, 5) + ", " + num(hi, 5) + "] over 20 instances";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"dirichlet moments vs simplex quadrature", criterion1},
      {"kalman update algebra", criterion2},
      {"dummy prior correction round trip", criterion3},
      {"confidence region coverage", criterion4},
      {"mode inside confidence region", criterion5},
      {"wald statistic moments", criterion6},
      {"marginal restriction fidelity", criterion7},
      {"maximum likelihood and physical region bound", criterion8},
      {"two-qubit bell state pipeline", criterion9},
      {"detector bank pipeline", criterion10},
      {"variance scaling with counts", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %2zu  %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
