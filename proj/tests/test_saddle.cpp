#include <catch2/catch_amalgamated.hpp>

#include "spsolve/saddle.hpp"

using namespace spsolve;

TEST_CASE("condition numbers") {
  ProblemParams p{100, 50, 30, 1, 2, 0, 0};
  auto c = condition_numbers(p);
  CHECK(c.delta_x == Catch::Approx(1.0));
  CHECK(c.delta_y == Catch::Approx(2.0));
  CHECK(c.kappa_x == Catch::Approx(100.0));
  CHECK(c.kappa_y == Catch::Approx(25.0));
  CHECK(c.kappa_xy == Catch::Approx(450.0));

  ProblemParams q{4, 4, 19, 0, 0, 1, 1};
  c = condition_numbers(q);
  CHECK(c.delta_x == Catch::Approx(0.25));
  CHECK(c.delta_y == Catch::Approx(0.25));
  CHECK(c.kappa_x == Catch::Approx(16.0));
  CHECK(c.kappa_y == Catch::Approx(16.0));
  CHECK(c.kappa_xy == Catch::Approx(5776.0));

  ProblemParams bad{100, 50, 30, 0, 2, 0, 0};  // delta_x = 0
  CHECK_THROWS_AS(condition_numbers(bad), DegenerateProblem);
}

TEST_CASE("margin report") {
  ProblemParams good{5, 5, 19, 1, 1, 0, 0};
  CHECK(check_margins(good).ok);

  ProblemParams boundary{4, 5, 19, 1, 1, 0, 0};  // L_x = 4 mu_x exactly
  auto rep = check_margins(boundary);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == "L_x > 4*mu_x");

  ProblemParams zeros{1, 1, 1, 0, 0, 0, 0};  // reduces to positivity
  CHECK(check_margins(zeros).ok);
}

namespace {

SaddlePointProblem tiny_problem(Vec cf) {
  // f = 1/2 |x|^2 + <cf, x>, g = 1/2 |y|^2, B = I_1
  SaddlePointProblem pb;
  pb.params = {2, 2, 1.5, 1, 1, 0, 0};
  pb.f = quadratic_fn(Mat::identity(1), std::move(cf), 2, 1);
  pb.g = quadratic_fn(Mat::identity(1), {0.0}, 2, 1);
  pb.B = dense_map(Mat::identity(1));
  return pb;
}

}  // namespace

TEST_CASE("kkt residual") {
  auto pb = tiny_problem({0.0});
  CHECK(kkt_residual(pb, {0.0}, {0.0}) == Catch::Approx(0.0));
  CHECK(kkt_residual(pb, {1.0}, {0.0}) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("exact quadratic solve, nonsingular") {
  auto pb = tiny_problem({-1.0});  // f = 1/2 x^2 - x
  auto sol = solve_quadratic_exact(pb);
  CHECK(sol.x_star[0] == Catch::Approx(0.5));
  CHECK(sol.y_star[0] == Catch::Approx(0.5));
  CHECK(sol.x_kernel.empty());
  CHECK(sol.y_kernel.empty());
  CHECK(kkt_residual(pb, sol.x_star, sol.y_star) <= 1e-8);

  auto pb0 = tiny_problem({0.0});
  auto sol0 = solve_quadratic_exact(pb0);
  CHECK(norm(sol0.x_star) == Catch::Approx(0.0).margin(1e-14));
  CHECK(norm(sol0.y_star) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("exact quadratic solve with coupling kernel") {
  // f depends only on x1 so its gradient stays in range B^T; mu_x = 0.
  SaddlePointProblem pb;
  pb.params = {2, 2, 1.5, 0, 1, 1, 1};
  Mat Hf(2, 2);
  Hf(0, 0) = 1.0;
  pb.f = quadratic_fn(Hf, {0.3, 0.0}, 2, 0);
  pb.g = quadratic_fn(Mat::identity(1), {-0.2}, 2, 1);
  Mat B(1, 2);
  B(0, 0) = 1.0;
  pb.B = dense_map(B);

  auto sol = solve_quadratic_exact(pb);
  REQUIRE(sol.x_kernel.size() == 1);
  CHECK(std::abs(std::abs(sol.x_kernel[0][1]) - 1.0) < 1e-10);
  CHECK(sol.y_kernel.empty());
  CHECK(kkt_residual(pb, sol.x_star, sol.y_star) <= 1e-8);
  // the solution representative carries no kernel component
  CHECK(std::abs(sol.x_star[1]) < 1e-12);

  // moving along the kernel keeps the KKT conditions satisfied
  Vec x_shift = add(sol.x_star, scale(sol.x_kernel[0], 2.5));
  CHECK(kkt_residual(pb, x_shift, sol.y_star) <= 1e-8);
}

TEST_CASE("solution distance metric") {
  SaddlePointProblem pb;
  pb.params = {2, 4, 1.5, 1, 2, 0, 0};  // delta_x = 1, delta_y = 2
  pb.f = quadratic_fn(Mat::identity(2), {0, 0}, 2, 1);
  Mat Hg = Mat::identity(2);
  Hg(0, 0) = 2;
  Hg(1, 1) = 2;
  pb.g = quadratic_fn(Hg, {0, 0}, 4, 2);
  pb.B = dense_map(Mat::identity(2));
  auto sol = solve_quadratic_exact(pb);

  CHECK(solution_distance2(pb, sol, sol.x_star, sol.y_star) == Catch::Approx(0.0).margin(1e-18));
  Vec x_off = add(sol.x_star, Vec{1.0, 0.0});
  CHECK(solution_distance2(pb, sol, x_off, sol.y_star) == Catch::Approx(1.0));
  Vec y_off = add(sol.y_star, Vec{0.0, 1.0});
  CHECK(solution_distance2(pb, sol, sol.x_star, y_off) == Catch::Approx(2.0));
}

TEST_CASE("non-quadratic oracle is rejected") {
  SaddlePointProblem pb = tiny_problem({0.0});
  pb.f.value = [](const Vec& x) { return std::pow(x[0], 4); };
  pb.f.gradient = [](const Vec& x) { return Vec{4.0 * std::pow(x[0], 3)}; };
  CHECK_THROWS_AS(solve_quadratic_exact(pb), NonQuadratic);
}
