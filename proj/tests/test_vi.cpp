#include <catch2/catch_amalgamated.hpp>

#include "spsolve/vi.hpp"
#include "support.hpp"

using namespace spsolve;

namespace {

VIProblem one_quadratic(int dim) {
  VIProblem vi;
  vi.dim = dim;
  vi.P = DiagWeight::ones(dim);
  vi.set = ConstraintSet::full_space();
  VIComponent c;
  c.p = quadratic_fn(Mat::identity(dim), Vec(static_cast<std::size_t>(dim), 0.0), 1.0, 1.0);
  c.Q = zero_op(dim);
  c.L = 1.0;
  c.M = 0.0;
  vi.comps.push_back(std::move(c));
  return vi;
}

}  // namespace

TEST_CASE("gap basics") {
  VIProblem vi = one_quadratic(1);
  CHECK(gap(vi, {0.7}, {0.7}) == Catch::Approx(0.0));
  CHECK(gap(vi, {1.0}, {0.0}) == Catch::Approx(0.5));

  // pure skew component: Q(0) = 0, so the gap at z = 0 vanishes
  VIProblem skew;
  skew.dim = 2;
  skew.P = DiagWeight::ones(2);
  skew.set = ConstraintSet::full_space();
  VIComponent c;
  c.p = zero_fn(2);
  c.Q.dim = 2;
  c.Q.apply = [](const Vec& z) { return Vec{z[1], -z[0]}; };
  c.L = 0.0;
  c.M = 1.0;
  skew.comps.push_back(std::move(c));
  CHECK(gap(skew, {3.0, -1.0}, {0.0, 0.0}) == Catch::Approx(0.0));
}

TEST_CASE("gap rejects infeasible probes") {
  VIProblem vi = one_quadratic(2);
  vi.set = ConstraintSet::ball({0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(gap(vi, {0.0, 0.0}, {2.0, 0.0}), InfeasiblePoint);
}

TEST_CASE("certified bound formula") {
  VIProblem vi = one_quadratic(1);
  vi.comps[0].L = 4.0;
  vi.comps[0].M = 0.0;
  // 4 * 4 / 4 * 1/2 = 2
  CHECK(gap_bound(vi, {2}, {1.0}, {0.0}) == Catch::Approx(2.0));
  CHECK(gap_bound(vi, {2}, {1.0}, {1.0}) == 0.0);

  VIProblem vi2;
  vi2.dim = 1;
  vi2.P = DiagWeight::ones(1);
  vi2.set = ConstraintSet::full_space();
  for (int i = 0; i < 2; ++i) {
    VIComponent c;
    c.p = zero_fn(1);
    c.Q = zero_op(1);
    c.L = 0.0;
    c.M = 1.0;
    vi2.comps.push_back(std::move(c));
  }
  // (2/2 + 4/4) * 1/2 r^2 = r^2
  double r = 1.7;
  CHECK(gap_bound(vi2, {2, 2}, {r}, {0.0}) == Catch::Approx(r * r));
}

TEST_CASE("bound is nonnegative and scales quadratically") {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    auto rvi = testing::make_random_vi(rng.uniform_int(1, 3), rng.uniform_int(2, 6), rng, false);
    std::vector<int> T;
    for (int i = 0; i < rvi.vi.n(); ++i) T.push_back(rng.uniform_int(1, 5));
    Vec z_in = rng.normal_vec(rvi.vi.dim);
    Vec z = rng.normal_vec(rvi.vi.dim);
    double b1 = gap_bound(rvi.vi, T, z_in, z);
    CHECK(b1 >= 0.0);
    Vec z2 = lincomb(3.0, z, -2.0, z_in);  // z_in + 3 (z - z_in)
    double b9 = gap_bound(rvi.vi, T, z_in, z2);
    CHECK(b9 == Catch::Approx(9.0 * b1).epsilon(1e-9));
  }
}

TEST_CASE("projection onto P balls") {
  DiagWeight P{{4.0, 1.0}};
  auto ball = ConstraintSet::ball({0.0, 0.0}, 1.0);
  Vec p = project(ball, P, {1.0, 0.0});
  CHECK(p[0] == Catch::Approx(0.5));
  CHECK(p[1] == 0.0);
  Vec inside{0.1, 0.1};
  CHECK(project(ball, P, inside) == inside);
  auto full = ConstraintSet::full_space();
  Vec z{5.0, -3.0};
  CHECK(project(full, P, z) == z);
}

TEST_CASE("projection is idempotent and nonexpansive") {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    int d = rng.uniform_int(1, 8);
    DiagWeight P{rng.uniform_vec(d, 0.2, 3.0)};
    auto ball = ConstraintSet::ball(rng.normal_vec(d), rng.uniform(0.2, 2.0));
    Vec a = rng.normal_vec(d), b = rng.normal_vec(d);
    Vec pa = project(ball, P, a);
    Vec pb = project(ball, P, b);
    CHECK(weighted_norm(sub(project(ball, P, pa), pa), P) <= 1e-12);
    CHECK(weighted_norm(sub(pa, pb), P) <= weighted_norm(sub(a, b), P) * (1.0 + 1e-12));
    CHECK(feasible(ball, P, pa));
  }
}

TEST_CASE("gap is affine in z_out beyond the smooth part") {
  // For quadratic p, gap(z_out, z) - p(z_out) must be affine in z_out:
  // the midpoint defect equals the p-only defect for every probe z.
  Rng rng(13);
  auto rvi = testing::make_random_vi(2, 4, rng, false);
  Vec a = rng.normal_vec(4), b = rng.normal_vec(4);
  Vec mid = lincomb(0.5, a, 0.5, b);
  double p_defect = eval_p(rvi.vi, a) + eval_p(rvi.vi, b) - 2.0 * eval_p(rvi.vi, mid);
  for (int k = 0; k < 5; ++k) {
    Vec z = rng.normal_vec(4);
    double defect = gap(rvi.vi, a, z) + gap(rvi.vi, b, z) - 2.0 * gap(rvi.vi, mid, z);
    CHECK(defect == Catch::Approx(p_defect).margin(1e-9));
  }
}

TEST_CASE("component count cap") {
  VIProblem vi = one_quadratic(1);
  for (int i = 0; i < 9; ++i) vi.comps.push_back(vi.comps[0]);
  CHECK_THROWS_AS(vi.validate(), InvalidInstance);
}
