#include <doctest.h>

#include "helpers.hpp"
#include "radon/errors.hpp"
#include "radon/optimality.hpp"
#include "radon/scenarios.hpp"
#include "radon/solver.hpp"

using namespace radon;
using namespace testing;

TEST_SUITE("optimality") {
  TEST_CASE("grid nodes are nested under doubling") {
    const Domain box(p2(0, -1), p2(2, 1));
    const auto coarse = grid_nodes(box, 4);
    const auto fine = grid_nodes(box, 8);
    CHECK(coarse.size() == 25);
    CHECK(fine.size() == 81);
    for (const auto& x : coarse) {
      CHECK(std::any_of(fine.begin(), fine.end(), [&](const Point& y) { return (x - y).norm() < 1e-14; }));
    }
  }

  TEST_CASE("local maximization finds an interior peak and respects the box") {
    const Scenario s = exact_gaussian_2d();
    const DualVariable p(s.problem, *s.measure);
    const LocalMax m = maximize_locally(p, s.problem.domain, p2(0.1, 0.9), +1);
    CHECK((m.x - p2(0.5, 0.5)).norm() < 1e-8);
    CHECK(m.value == doctest::Approx(1.0));
    // -p on the unit square is maximized on the boundary.
    const LocalMax b = maximize_locally(p, s.problem.domain, p2(0.45, 0.5), -1);
    CHECK(s.problem.domain.distance_to_boundary(b.x) < 1e-12);
  }

  TEST_CASE("first order: zero is optimal for weak data") {
    const Scenario s = below_threshold();
    const auto rep = check_first_order(s.problem, DiscreteMeasure(1), 64, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.max_abs_p <= s.problem.alpha);
    // Global minimality: no measure in a random sample does better.
    std::mt19937_64 rng(3);
    const double j0 = objective(s.problem, DiscreteMeasure(1));
    for (int i = 0; i < 50; ++i) {
      CHECK(objective(s.problem, random_measure(rng, 1, 3)) >= j0);
    }
  }

  TEST_CASE("first order: solver output on the two-spike instance passes") {
    const Scenario s = two_spike_recovery(1e-3);
    const auto res = solve_gcg(s.problem);
    const auto rep = check_first_order(s.problem, res.u, 128, 1e-6);
    CHECK(rep.pass);
  }

  TEST_CASE("first order: atom off the level set fails (b)") {
    // Data equal to the atom's image: zero residual, so p vanishes at the atom.
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(6, 0, 1), 0.2);
    const Problem P(Domain::unit(1), k, Loss::quadratic(Vector::Zero(6)), 1.0);
    const Problem Q(Domain::unit(1), k, Loss::quadratic(k.eval(p1(0.4))), 1.0);
    const auto rep = check_first_order(Q, m1({{0.4, 1.0}}), 64, 1e-6);
    CHECK(std::abs(DualVariable(Q, m1({{0.4, 1.0}})).value(p1(0.4))) < 1e-14);
    CHECK_FALSE(rep.atoms_on_level_set);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_atom_residual == doctest::Approx(1.0));
    CHECK_THROWS_AS(check_first_order(P, DiscreteMeasure(1), 8, 1e-6), Error);
  }

  TEST_CASE("active sets: nondegenerate two-spike instance") {
    const Scenario s = nondegenerate_two_spike();
    const auto sets = active_sets(s.problem, *s.measure, 256);
    REQUIRE(sets.atoms.size() == 2);
    CHECK(sets.atoms[0].sign == 1);
    CHECK(sets.atoms[1].sign == -1);
    CHECK(sets.strict_complementarity());
    CHECK(sets.sigma > 0.0);
    CHECK(sets.r0 > 0.0);
    CHECK(sets.local_theta > 0.0);
  }

  TEST_CASE("active sets: constructed touching point is found") {
    const Scenario s = touching_point();
    const auto sets = active_sets(s.problem, *s.measure, 256);
    REQUIRE(sets.i_plus.size() == 1);
    CHECK(sets.i_plus[0].x[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(sets.i_minus.empty());
    CHECK_FALSE(sets.strict_complementarity());
  }

  TEST_CASE("active sets: zero data gives sigma = alpha") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(6, 0, 1), 0.2);
    const Problem P(Domain::unit(1), k, Loss::quadratic(Vector::Zero(6)), 0.7);
    const auto sets = active_sets(P, DiscreteMeasure(1), 64);
    CHECK(sets.atoms.empty());
    CHECK(sets.strict_complementarity());
    CHECK(sets.sigma == doctest::Approx(0.7));
  }

  TEST_CASE("active sets: inconsistent stationarity") {
    const Kernel k = Kernel::gaussian(Vector::LinSpaced(6, 0, 1), 0.2);
    const Problem Q(Domain::unit(1), k, Loss::quadratic(k.eval(p1(0.4))), 1.0);
    CHECK_THROWS_AS(active_sets(Q, m1({{0.4, 1.0}}), 64), InconsistentStationarity);
  }

  TEST_CASE("property: verdicts stable under refinement and atom order, sigma nonincreasing") {
    for (const Scenario& s : {nondegenerate_two_spike(), nondegenerate_three_spike(), touching_point()}) {
      const DiscreteMeasure& u = *s.measure;
      std::vector<Atom> reversed(u.atoms().rbegin(), u.atoms().rend());
      const auto v = DiscreteMeasure::canonicalize(reversed, 1);
      double prev_sigma = std::numeric_limits<double>::infinity();
      for (int n : {64, 128, 256, 512}) {
        const auto a = check_first_order(s.problem, u, n, 1e-6);
        const auto b = check_first_order(s.problem, v, n, 1e-6);
        CHECK(a.pass);
        CHECK(a.pass == b.pass);
        const auto sa = active_sets(s.problem, u, n);
        const auto sb = active_sets(s.problem, v, n);
        CHECK(sa.i_plus.size() == sb.i_plus.size());
        CHECK(sa.sigma == sb.sigma);
        CHECK(sa.sigma <= prev_sigma + 1e-12);
        if (n > 64) CHECK(prev_sigma - sa.sigma <= 1e-4);
        prev_sigma = sa.sigma;
      }
    }
  }
}
