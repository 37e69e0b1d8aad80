#include <doctest.h>

#include <random>

#include "drrt/geometry.hpp"
#include "test_utils.hpp"

using namespace drrt;

TEST_CASE("polytope membership agrees with the rectangle oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const double x0 = testutil::urand(rng, -10.0, 10.0);
        const double y0 = testutil::urand(rng, -10.0, 10.0);
        const double w = testutil::urand(rng, 0.5, 8.0);
        const double h = testutil::urand(rng, 0.5, 8.0);
        const Polytope box = Polytope::box(Eigen::Vector2d(x0, y0), Eigen::Vector2d(x0 + w, y0 + h));
        const Eigen::Vector2d p(testutil::urand(rng, -15.0, 15.0),
                                testutil::urand(rng, -15.0, 15.0));
        const bool oracle = p.x() >= x0 && p.x() <= x0 + w && p.y() >= y0 && p.y() <= y0 + h;
        CHECK(box.contains(p) == oracle);
    }
}

TEST_CASE("translation composes with membership") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Polytope box =
            Polytope::box(Eigen::Vector2d(-1.0, -2.0), Eigen::Vector2d(3.0, 1.0));
        const Eigen::Vector2d shift(testutil::urand(rng, -5.0, 5.0),
                                    testutil::urand(rng, -5.0, 5.0));
        const Polytope moved = box.translated(shift);
        const Eigen::Vector2d p(testutil::urand(rng, -8.0, 8.0), testutil::urand(rng, -8.0, 8.0));
        CHECK(moved.contains(p) == box.contains(p - shift));
    }
}

TEST_CASE("inflation widens every face by the radius") {
    const Polytope unit = Polytope::box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
    const Polytope grown = unit.inflated(0.25);
    CHECK(grown.contains(Eigen::Vector2d(-0.2, 0.5)));
    CHECK_FALSE(grown.contains(Eigen::Vector2d(-0.3, 0.5)));
    CHECK(unit.inflated(0.0).contains(Eigen::Vector2d(1.0, 1.0)));
}

TEST_CASE("polytope validation rejects degenerate input") {
    Polytope empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    Polytope zero_normal;
    zero_normal.halfspaces.push_back(Halfspace{Eigen::Vector2d(0.0, 0.0), 1.0});
    CHECK_THROWS_AS(zero_normal.validate(), std::invalid_argument);

    Polytope mixed;
    mixed.halfspaces.push_back(Halfspace{Eigen::Vector2d(1.0, 0.0), 1.0});
    mixed.halfspaces.push_back(Halfspace{Eigen::VectorXd::Ones(3), 1.0});
    CHECK_THROWS_AS(mixed.validate(), std::invalid_argument);
}

TEST_CASE("2-D vertex enumeration recovers box corners in order") {
    const Polytope box = Polytope::box(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(4.0, 6.0));
    const auto verts = polytope_vertices_2d(box);
    REQUIRE(verts.size() == 4);
    // Counter-clockwise and closed under the box corner set.
    double area2 = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto& a = verts[i];
        const auto& b = verts[(i + 1) % verts.size()];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    CHECK(area2 == doctest::Approx(2.0 * 3.0 * 4.0));
    for (const auto& v : verts) {
        CHECK((v.x() == doctest::Approx(1.0) || v.x() == doctest::Approx(4.0)));
        CHECK((v.y() == doctest::Approx(2.0) || v.y() == doctest::Approx(6.0)));
    }
}
