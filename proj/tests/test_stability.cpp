#include <cmath>
#include <random>

#include "ard/error.hpp"
#include "ard/stability.hpp"
#include "doctest.h"

using namespace ard;

namespace {

const AnnulusGeometry kUnit = make_annulus(0.5, 1.0);

// Frozen from tests/oracles/stability_oracle.py.
constexpr double kHopfTrace = 312.7767371583738281676354;
constexpr double kHopfDetConsistent = 176821.9914894586676915296;
constexpr double kHopfDetLiteral = 173530.642004857755964584;
constexpr double kTuringOnlyBound = -0.1810666666666666666666667;
constexpr double kNegativeLBound = 0.5358212712397734424166142;

double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

}  // namespace

TEST_CASE("steady state") {
  auto s = steady_state(1.0, 2.0);
  CHECK(s.u == 3.0);
  CHECK(s.v == doctest::Approx(2.0 / 9.0));
  s = steady_state(0.09, 0.45);
  CHECK(s.u == doctest::Approx(0.54));
  CHECK(s.v == doctest::Approx(0.45 / 0.2916));
  CHECK(std::abs(s.residual_f) < 1e-12);
  CHECK(std::abs(s.residual_g) < 1e-12);
  CHECK_THROWS_AS(steady_state(0.3, -0.3), Error);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_params(0.0, 0.5, 1, 1), Error);
  CHECK_THROWS_AS(make_params(0.1, 0.5, -1, 1), Error);
  CHECK_THROWS_AS(make_params(0.1, 0.5, 1, std::nan("")), Error);
}

TEST_CASE("trace and determinant") {
  const auto p = make_params(0.1, 0.9, 1, 1);
  const auto td = trace_det(p, 0.0, DeterminantForm::Consistent);
  CHECK(td.trace == doctest::Approx(-0.2));
  CHECK(td.det == doctest::Approx(1.0));
  const auto lit = trace_det(p, 0.0, DeterminantForm::Literal);
  CHECK(lit.trace == td.trace);
  CHECK(lit.det == td.det);

  const auto h = make_params(0.05, 0.55, 730, 5);
  const double e = eigenvalue({0, 1.3}, kUnit).eta_sq;
  const auto c = trace_det(h, e, DeterminantForm::Consistent);
  const auto l = trace_det(h, e, DeterminantForm::Literal);
  CHECK(rel(c.trace, kHopfTrace) < 1e-12);
  CHECK(rel(c.det, kHopfDetConsistent) < 1e-12);
  CHECK(rel(l.det, kHopfDetLiteral) < 1e-12);
}

TEST_CASE("roots") {
  auto r = roots(-0.2, 1.0);
  CHECK(r.first.real() == doctest::Approx(-0.1));
  CHECK(std::abs(r.first.imag()) == doctest::Approx(0.99499).epsilon(1e-5));
  CHECK(r.second == std::conj(r.first));
  r = roots(0.0, 1.0);
  CHECK(r.first.real() == 0.0);
  CHECK(std::abs(r.first.imag()) == doctest::Approx(1.0));
  r = roots(2.0, 1.0);
  CHECK(r.first == std::complex<double>(1.0, 0.0));
  CHECK(r.second == std::complex<double>(1.0, 0.0));
  r = roots(1e8, 1.0);  // cancellation-prone small root
  CHECK(r.second.real() == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("classification examples") {
  const auto turing = classify_mode(make_params(0.09, 0.45, 250, 10), {0, 1.3}, kUnit);
  const auto hopf = classify_mode(make_params(0.05, 0.55, 730, 5), {0, 1.3}, kUnit);
  CHECK(hopf.label == Region::HopfInstability);
  // The Turing point of the simulation table destabilises through k = 1; the
  // fundamental mode alone puts it in the oscillatory region.
  CHECK(turing.label == Region::HopfInstability);
  CHECK(classify_mode(make_params(0.09, 0.45, 250, 10), {1, 1.3}, kUnit).label ==
        Region::TuringInstability);
  CHECK(classify_multimode(make_params(0.09, 0.45, 250, 10), 1.3, 3, kUnit).label ==
        Region::TuringInstability);
  const auto tc = classify_point(make_params(0.1875, 0.3125, 10, 3.7), 0.0);
  CHECK(tc.label == Region::TranscriticalCurve);
  CHECK(tc.det == doctest::Approx(25.0));
  CHECK(classify_point(make_params(0.1, 0.9, 1, 1), 0.0).label == Region::StableSpiral);
}

TEST_CASE("label table") {
  CHECK(region_label(-3, 1, 1e-9) == Region::StableNode);
  CHECK(region_label(-3, -1, 1e-9) == Region::TuringInstability);
  CHECK(region_label(3, 1, 1e-9) == Region::TuringInstability);
  CHECK(region_label(-1, 1, 1e-9) == Region::StableSpiral);
  CHECK(region_label(1, 1, 1e-9) == Region::HopfInstability);
  CHECK(region_label(0, 1, 1e-9) == Region::TranscriticalCurve);
  CHECK(region_label(2, 1, 1e-9) == Region::DiscriminantCurve);
  for (int i = 0; i < kRegionCount; ++i) {
    const auto r = static_cast<Region>(i);
    CHECK(parse_region(to_string(r)) == r);
  }
  CHECK(!parse_region("Nope"));
}

TEST_CASE("root identities and swap invariance over random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(1e-3, 1.0), gd(0.5, 800.0), dd(0.5, 30.0), ed(0.0, 60.0);
  for (int i = 0; i < 5000; ++i) {
    const auto p = make_params(u01(rng), u01(rng), gd(rng), dd(rng));
    const double e = ed(rng);
    for (auto form : {DeterminantForm::Consistent, DeterminantForm::Literal}) {
      const auto v = classify_point(p, e, form);
      const double scale = std::max({1.0, std::abs(v.trace), std::sqrt(std::abs(v.det))});
      CHECK(std::abs((v.sigma1 + v.sigma2).real() - v.trace) <= 1e-10 * scale);
      CHECK(std::abs((v.sigma1 * v.sigma2).real() - v.det) <= 1e-10 * scale * scale);
      // Label is a function of (T, D) only; the root order does not enter.
      const double tol = default_curve_tolerance(v.trace, v.det);
      CHECK(region_label(v.trace, v.det, tol) == v.label);
    }
  }
}

TEST_CASE("no diffusion-driven instability without diffusion") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(1e-3, 1.0), gd(0.5, 800.0), dd(0.5, 30.0);
  for (int i = 0; i < 20000; ++i) {
    const auto p = make_params(u01(rng), u01(rng), gd(rng), dd(rng));
    const auto v = classify_point(p, 0.0);
    if (v.trace < 0.0 && v.det > 0.0) CHECK(v.label != Region::TuringInstability);
  }
}

TEST_CASE("kinetic trace term is bounded by one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-9, 10.0);
  double worst = -1e300;
  for (int i = 0; i < 1000000; ++i) {
    const double a = u(rng), b = u(rng), s = a + b;
    worst = std::max(worst, (b - a - s * s * s) / s);
  }
  CHECK(worst < 1.0);
}

TEST_CASE("hopf admissibility") {
  const auto h = hopf_admissibility(8, 21, {0, 0.27}, 0.5, 0.5);
  CHECK(h.exact_admissible);
  CHECK(h.bound_threshold == doctest::Approx(kNegativeLBound).epsilon(1e-14));
  CHECK_FALSE(h.bound_admissible);
  const auto low = hopf_admissibility(1.4, 1, {0, 0.27}, 0.5, 0.5);
  CHECK_FALSE(low.exact_admissible);
  CHECK((2.4 * low.eta_sq) == doctest::Approx(2.7253371919943294966));
  CHECK(hopf_admissibility(1.4, 1e9, {0, 0.27}, 0.5, 0.5).exact_admissible);
  // Monotone in gamma (true stays true) and in d (false stays false).
  bool seen = false;
  for (double g = 0.5; g < 100; g *= 1.1) {
    const bool now = hopf_admissibility(8, g, {0, 0.27}, 0.5, 0.5).exact_admissible;
    CHECK(!(seen && !now));
    seen = seen || now;
  }
  bool lost = false;
  for (double d = 0.5; d < 100; d *= 1.1) {
    const bool now = hopf_admissibility(d, 21, {0, 0.27}, 0.5, 0.5).exact_admissible;
    CHECK(!(lost && now));
    lost = lost || !now;
  }
}

TEST_CASE("closed-form stability bounds") {
  const auto t = turing_only_bound(10, 250, {0, 1.3}, 0.5);
  CHECK(t.value == doctest::Approx(kTuringOnlyBound).epsilon(1e-13));
  CHECK_FALSE(t.admissible);
  const auto n = negative_l_bound(8, 21, {0, 0.27}, 0.5);
  CHECK(n.value == doctest::Approx(kNegativeLBound).epsilon(1e-13));
  CHECK(n.admissible);
  // Difference of the printed expressions.
  const double d = 3, g = 7, a = 0.5;
  const ModeIndex m{2, 1.3};
  const double diff = negative_l_bound(d, g, m, a).value - turing_only_bound(d, g, m, a).value;
  CHECK(diff == doctest::Approx(4 * (d + 1) * 5 * (1.3 + 5) * (1.3 + 8) / (g * a * (1.3 + 10))));
  CHECK(turing_only_bound(10, 1e-12, {0, 1.3}, 0.5).value > 1e10);
  CHECK_FALSE(negative_l_bound(10, 1e12, {0, 1.3}, 0.5).admissible);
  // Linearity in (d+1): doubling (d+1) doubles the first numerator term.
  const double base = turing_only_bound(1.0, g, m, a).value + a;
  const double doubled = turing_only_bound(3.0, g, m, a).value + a;
  CHECK(doubled == doctest::Approx(2 * base));
}

TEST_CASE("repeated root thresholds") {
  const auto boundary = repeated_root_thresholds(make_params(0.1875, 0.3125, 10, 1), {0, 0.27}, 0.5,
                                                 LBranch::PositiveL);
  CHECK_FALSE(boundary.restriction_ok);
  CHECK_FALSE(boundary.rho_stable_below.has_value());
  const auto p = make_params(0.05, 0.55, 730, 5);
  const auto pos = repeated_root_thresholds(p, {0, 1.3}, 0.5, LBranch::PositiveL);
  const auto neg = repeated_root_thresholds(p, {0, 1.3}, 0.5, LBranch::NegativeL);
  CHECK(pos.restriction_ok);
  REQUIRE(pos.rho_stable_below.has_value());
  REQUIRE(neg.rho_stable_below.has_value());
  CHECK(*neg.rho_stable_below == doctest::Approx(2 * (*pos.rho_stable_below + 0.5) - 0.5));
}

TEST_CASE("verdict csv row") {
  const auto v = classify_mode(make_params(0.05, 0.55, 730, 5), {0, 1.3}, kUnit);
  const auto row = verdict_csv_row(v);
  CHECK(row.rfind("0.05,0.55,730,5,0,1.3,5.45943,312.777,176822,", 0) == 0);
  CHECK(row.substr(row.size() - 15) == "HopfInstability");
  CHECK(verdict_csv_header() == "alpha,beta,gamma,d,k,l,eta_sq,T,D,re_sigma1,im_sigma1,label");
}
