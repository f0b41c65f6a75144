#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cim/opinion.hpp"
#include "cim/rng.hpp"

using namespace cim;

namespace {

Opinion random_opinion(Rng& rng) {
  // Uniform on the simplex via sorted uniforms.
  double x = uniform01(rng), y = uniform01(rng);
  if (x > y) std::swap(x, y);
  return {x, y - x, 1.0 - y, uniform01(rng)};
}

void check_close(const Opinion& got, const Opinion& want, double tol = 1e-12) {
  CHECK(got.b == doctest::Approx(want.b).epsilon(tol));
  CHECK(got.d == doctest::Approx(want.d).epsilon(tol));
  CHECK(got.u == doctest::Approx(want.u).epsilon(tol));
  CHECK(got.a == doctest::Approx(want.a).epsilon(tol));
}

}  // namespace

TEST_CASE("opinion_from_evidence maps counts onto the simplex") {
  check_close(opinion_from_evidence({1, 1, 101}, 0.5), {1.0 / 103, 1.0 / 103, 101.0 / 103, 0.5});
  check_close(opinion_from_evidence({100, 1, 2}, 1.0), {100.0 / 103, 1.0 / 103, 2.0 / 103, 1.0});
  check_close(opinion_from_evidence({0, 0, 1}, 0.5), {0, 0, 1, 0.5});

  CHECK_THROWS_AS(opinion_from_evidence({1, 1, 0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(opinion_from_evidence({-1, 1, 2}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(opinion_from_evidence({1, -1, 2}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(opinion_from_evidence({1, 1, 2}, 1.5), std::invalid_argument);
}

TEST_CASE("projection") {
  auto p = project({0.2, 0.3, 0.5, 0.6});
  CHECK(p.belief == doctest::Approx(0.5));
  CHECK(p.disbelief == doctest::Approx(0.5));
  p = project({1, 0, 0, 1});
  CHECK(p.belief == 1.0);
  CHECK(p.disbelief == 0.0);
  p = project({0, 0, 1, 0.25});
  CHECK(p.belief == 0.25);
  CHECK(p.disbelief == 0.75);
}

TEST_CASE("dissonance") {
  CHECK(dissonance({0.4, 0.4, 0.2, 0.5}) == doctest::Approx(0.8));
  CHECK(dissonance({0.4, 0.0, 0.6, 0.5}) == 0.0);
  CHECK(dissonance({0.0, 0.0, 1.0, 0.5}) == 0.0);
  CHECK(dissonance({0.49, 0.505, 0.005, 0.5}) == doctest::Approx(0.98));
}

TEST_CASE("trust coefficients") {
  TrustModel uom{TrustKind::Uom};
  TrustModel hom{TrustKind::Hom};
  TrustModel nom{TrustKind::Nom};
  CHECK(trust_coefficient(uom, {0.25, 0.25, 0.5, 0.5}, {0.1, 0.4, 0.5, 0.5}) == doctest::Approx(0.25));
  CHECK(trust_coefficient(hom, {0.7, 0.1, 0.2, 0.5}, {0.7, 0.1, 0.2, 0.3}) == doctest::Approx(1.0));
  CHECK(trust_coefficient(hom, {1, 0, 0, 0.5}, {0, 1, 0, 0.5}) == 0.0);
  CHECK(trust_coefficient(hom, {0, 0, 1, 0.5}, {0.3, 0.1, 0.6, 0.5}) == 0.0);
  CHECK(trust_coefficient(nom, {0, 0, 1, 0.5}, {1, 0, 0, 0.5}) == 1.0);

  SUBCASE("symmetric for every model") {
    Rng rng(7);
    for (int k = 0; k < 10000; ++k) {
      const Opinion x = random_opinion(rng), y = random_opinion(rng);
      for (const TrustModel& m : {uom, hom, nom}) {
        const double c = trust_coefficient(m, x, y);
        CHECK(c == doctest::Approx(trust_coefficient(m, y, x)).epsilon(1e-14));
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
      }
    }
  }
}

TEST_CASE("discount") {
  const Opinion op{0.6, 0.2, 0.2, 0.5};
  check_close(discount(op, 1.0), op);
  check_close(discount(op, 0.0), {0, 0, 1, 0.5});
  check_close(discount(op, 0.5), {0.3, 0.1, 0.6, 0.5});
}

TEST_CASE("fuse with a vacuous sender keeps the receiver's masses") {
  const Opinion own{0.3, 0.2, 0.5, 0.4};
  for (double c : {0.0, 0.3, 1.0}) {
    const Opinion out = fuse(own, {0, 0, 1, 0.9}, c);
    CHECK(out.b == doctest::Approx(own.b));
    CHECK(out.d == doctest::Approx(own.d));
    CHECK(out.u == doctest::Approx(own.u));
  }
}

TEST_CASE("full-trust fusion pools evidence") {
  // Oracle: with c = 1 cumulative fusion equals the opinion of the summed
  // evidence counts under the same prior weight.
  const double w = 2.0;
  const Opinion x = opinion_from_evidence({2, 1, w}, 0.5);
  const Opinion y = opinion_from_evidence({1, 3, w}, 0.5);
  const Opinion pooled = opinion_from_evidence({3, 4, w}, 0.5);
  const Opinion fused = fuse(x, y, 1.0);
  CHECK(fused.b == doctest::Approx(pooled.b).epsilon(1e-12));
  CHECK(fused.d == doctest::Approx(pooled.d).epsilon(1e-12));
  CHECK(fused.u == doctest::Approx(pooled.u).epsilon(1e-12));
  CHECK(fused.a == doctest::Approx(0.5));
}

TEST_CASE("fusion rejects dogmatic pairs under full trust") {
  CHECK_THROWS_AS(fuse({1, 0, 0, 0.5}, {0, 1, 0, 0.5}, 1.0), std::domain_error);
  CHECK_NOTHROW(fuse({1, 0, 0, 0.5}, {0, 1, 0, 0.5}, 0.5));
}

TEST_CASE("fully vacuous receiver adopts the sender's base rate") {
  const Opinion out = fuse({0, 0, 1, 0.2}, {0.5, 0.2, 0.3, 0.9}, 1.0);
  CHECK(out.a == doctest::Approx(0.9));
  // Both vacuous: the base-rate denominator vanishes and a_i is kept.
  CHECK(fuse({0, 0, 1, 0.2}, {0, 0, 1, 0.9}, 1.0).a == 0.2);
}

TEST_CASE("vacuity maximization") {
  const Opinion m = vacuity_maximize({0.4, 0.2, 0.4, 0.5});
  CHECK(m.u == doctest::Approx(0.8));
  CHECK(m.b == doctest::Approx(0.2));
  CHECK(m.d == 0.0);
  check_close(vacuity_maximize({0.2, 0.0, 0.8, 0.5}), {0.2, 0.0, 0.8, 0.5});
  check_close(vacuity_maximize({0.5, 0.5, 0.0, 0.5}), {0, 0, 1, 0.5});

  SUBCASE("boundary base rates") {
    const Opinion lo = vacuity_maximize({0.3, 0.5, 0.2, 0.0});
    CHECK(is_valid(lo));
    CHECK(lo.u == doctest::Approx(0.7));
    CHECK(lo.d == 0.0);
    const Opinion hi = vacuity_maximize({0.3, 0.5, 0.2, 1.0});
    CHECK(is_valid(hi));
    CHECK(hi.u == doctest::Approx(0.5));
    CHECK(hi.b == 0.0);
  }
}

TEST_CASE("UOM refresh") {
  const TrustModel uom{TrustKind::Uom};
  const Opinion dissonant{0.49, 0.505, 0.005, 0.5};
  const Opinion refreshed = apply_uom_refresh(dissonant, uom);
  CHECK(refreshed != dissonant);
  CHECK(project(refreshed).belief == doctest::Approx(project(dissonant).belief).epsilon(1e-12));
  CHECK(refreshed.u > 0.9);

  const Opinion confident{0.99, 0.005, 0.005, 0.5};
  CHECK(apply_uom_refresh(confident, uom) == confident);
  const Opinion uncertain{0.3, 0.3, 0.4, 0.5};
  CHECK(apply_uom_refresh(uncertain, uom) == uncertain);
  CHECK(apply_uom_refresh(dissonant, TrustModel{TrustKind::Nom}) == dissonant);
}

TEST_CASE("SL algebra properties over random opinions") {
  Rng rng(20240601);
  const TrustModel models[] = {{TrustKind::Uom}, {TrustKind::Hom}, {TrustKind::Nom}};
  int failures = 0;
  for (int k = 0; k < 20000; ++k) {
    const Opinion x = random_opinion(rng), y = random_opinion(rng);
    for (const TrustModel& m : models) {
      const double c = trust_coefficient(m, x, y);
      const Opinion dy = discount(y, c);
      if (!is_valid(dy)) ++failures;
      const Opinion f = fuse(x, y, c);
      if (!is_valid(f)) ++failures;
      if (f.u > x.u + 1e-12) ++failures;
    }
    const Projection p = project(x);
    if (std::abs(p.belief + p.disbelief - 1.0) > 1e-9) ++failures;
    const Opinion vm = vacuity_maximize(x);
    const Projection q = project(vm);
    if (std::abs(q.belief - p.belief) > 1e-9 || std::min(vm.b, vm.d) != 0.0 || !is_valid(vm)) ++failures;
  }
  CHECK(failures == 0);
}
