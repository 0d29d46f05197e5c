#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "windtree/geometry.hpp"

using namespace windtree;

namespace {

const Rect<double> kUnitRect{{0, 0}, 0.25, 0.25};
const double kH = std::sqrt(0.5);

Vec2<double> unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("ray_rect_intersection examples") {
    auto h = ray_rect_intersection<double>({0.5, 0}, {-1, 0}, kUnitRect);
    REQUIRE(h);
    CHECK(h->t == doctest::Approx(0.25));
    CHECK(h->point.x == doctest::Approx(0.25));
    CHECK(h->point.y == doctest::Approx(0.0));
    CHECK(h->normal == Vec2<double>{1, 0});
    CHECK(h->kind == HitKind::Regular);

    CHECK_FALSE(ray_rect_intersection<double>({1, 1}, {1, 0}, kUnitRect));

    h = ray_rect_intersection<double>({0.5, 0.5}, {-kH, -kH}, kUnitRect);
    REQUIRE(h);
    CHECK(h->point.x == doctest::Approx(0.25));
    CHECK(h->point.y == doctest::Approx(0.25));
    CHECK(h->kind == HitKind::Corner);
  }

  TEST_CASE("exact corner hit is detected by equality") {
    const Rect<Rational> r{{Rational(0), Rational(0)}, Rational(1, 4), Rational(1, 4)};
    auto h = ray_rect_intersection<Rational>({Rational(1, 2), Rational(1, 2)}, {Rational(-1), Rational(-1)}, r);
    REQUIRE(h);
    CHECK(h->kind == HitKind::Corner);
    CHECK(h->point == Vec2<Rational>{Rational(1, 4), Rational(1, 4)});
    CHECK(h->t == Rational(1, 4));

    // One lattice unit of 1/2^40 away from the corner is a regular hit.
    const Rational eps(1, BigInt(1) << 40);
    h = ray_rect_intersection<Rational>({Rational(1, 2), Rational(1, 2) - eps}, {Rational(-1), Rational(-1)}, r);
    REQUIRE(h);
    CHECK(h->kind == HitKind::Regular);
  }

  TEST_CASE("grazing along a face is tangent") {
    auto h = ray_rect_intersection<double>({1, 0.25}, {-1, 0}, kUnitRect);
    REQUIRE(h);
    CHECK(h->kind == HitKind::Tangent);
  }

  TEST_CASE("reflect_rect examples") {
    CHECK(reflect_rect<double>({-1, 0}, {1, 0}) == Vec2<double>{1, 0});
    CHECK(reflect_rect<double>({-0.6, 0.8}, {1, 0}) == Vec2<double>{0.6, 0.8});
    CHECK(reflect_rect<double>({0.6, -0.8}, {0, 1}) == Vec2<double>{0.6, 0.8});
    CHECK_THROWS_AS(reflect_rect<double>({-kH, -kH}, {kH, kH}), std::invalid_argument);
    CHECK_THROWS_AS(reflect_rect<double>({1, 0}, {1, 0}), std::invalid_argument);
  }

  TEST_CASE("ray_disk_intersection examples") {
    const Disk disk{{0, 0}, 0.5};
    auto h = ray_disk_intersection({-2, 0}, {1, 0}, disk);
    REQUIRE(h);
    CHECK(h->t == doctest::Approx(1.5));
    CHECK(h->point.x == doctest::Approx(-0.5));
    CHECK(h->normal.x == doctest::Approx(-1.0));
    CHECK(h->normal.y == doctest::Approx(0.0));
    CHECK(h->kind == HitKind::Regular);

    h = ray_disk_intersection({-2, 0.5}, {1, 0}, disk);
    REQUIRE(h);
    CHECK(h->kind == HitKind::Tangent);
    CHECK(h->point.x == doctest::Approx(0.0));
    CHECK(h->point.y == doctest::Approx(0.5));

    CHECK_FALSE(ray_disk_intersection({-2, 1}, {1, 0}, disk));
  }

  TEST_CASE("reflect_disk examples") {
    auto r = reflect_disk({1, 0}, {-1, 0});
    CHECK(r.x == doctest::Approx(-1.0));
    CHECK(r.y == doctest::Approx(0.0));
    r = reflect_disk({1, 0}, {-kH, kH});
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(1.0));
    r = reflect_disk({0, -1}, {0, 1});
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(1.0));
  }

  TEST_CASE("reflections preserve norm and are involutions") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    const Vec2<double> axis[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int k = 0; k < 10000; ++k) {
      const Vec2<double> n = unit(ang(rng));
      Vec2<double> d = unit(ang(rng));
      if (dot(d, n) > -1e-6) d = -d;
      if (dot(d, n) > -1e-6) continue;
      const auto out = reflect_disk(d, n);
      CHECK(std::abs(norm(out) - 1.0) <= 1e-12);
      const auto back = reflect_disk(-out, n);
      CHECK(std::abs(back.x + d.x) <= 1e-12);
      CHECK(std::abs(back.y + d.y) <= 1e-12);

      const Vec2<double> a = axis[k % 4];
      Vec2<double> e = unit(ang(rng));
      if (dot(e, a) >= 0) e = -e;
      if (dot(e, a) == 0) continue;
      const auto f = reflect_rect(e, a);
      CHECK(std::abs(f.x) == std::abs(e.x));
      CHECK(std::abs(f.y) == std::abs(e.y));
      CHECK(reflect_rect(-f, a) == -e);
    }
    for (int p = -5; p <= 5; ++p)
      for (int q = 1; q <= 5; ++q) {
        const Vec2<Rational> d{Rational(-q), Rational(p)};
        const auto f = reflect_rect<Rational>(d, {Rational(1), Rational(0)});
        CHECK(dot(f, f) == dot(d, d));
        CHECK(reflect_rect<Rational>(-f, {Rational(1), Rational(0)}) == -d);
      }
  }

  TEST_CASE("ray_rect_intersection agrees with the side-segment oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2), half(0.01, 0.49), ang(0, 2 * M_PI);
    int hits = 0;
    for (int k = 0; k < 20000; ++k) {
      const Rect<double> r{{u(rng), u(rng)}, half(rng), half(rng)};
      const Vec2<double> o{u(rng) * 2, u(rng) * 2};
      if (o.x >= r.left() && o.x <= r.right() && o.y >= r.bottom() && o.y <= r.top()) continue;
      const Vec2<double> d = unit(ang(rng));
      const auto got = ray_rect_intersection(o, d, r);
      const auto want = oracle::ray_rect(o, d, r, 1e-12);
      REQUIRE(bool(got) == bool(want));
      if (!got) continue;
      ++hits;
      CHECK(std::abs(got->t - want->t) <= 1e-9 * std::max(1.0, want->t));
      CHECK((got->kind != HitKind::Regular) == want->at_vertex);
      if (!want->at_vertex) CHECK(got->normal == want->normal);
    }
    CHECK(hits > 500);
  }

  TEST_CASE("exact ray_rect_intersection agrees with the oracle on grid-aligned rays") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> coord(-16, 16), dir(-4, 4);
    const Rect<Rational> r{{Rational(0), Rational(0)}, Rational(1, 4), Rational(3, 8)};
    int vertex_hits = 0;
    for (int k = 0; k < 5000; ++k) {
      const Vec2<Rational> o{Rational(coord(rng), 8), Rational(coord(rng), 8)};
      if (o.x >= r.left() && o.x <= r.right() && o.y >= r.bottom() && o.y <= r.top()) continue;
      const Vec2<Rational> d{Rational(dir(rng)), Rational(dir(rng))};
      if (d.x == 0 && d.y == 0) continue;
      const auto got = ray_rect_intersection(o, d, r);
      const auto want = oracle::ray_rect(o, d, r, Rational(0));
      REQUIRE(bool(got) == bool(want));
      if (!got) continue;
      CHECK(got->t == want->t);
      CHECK((got->kind != HitKind::Regular) == want->at_vertex);
      if (want->at_vertex) ++vertex_hits;
      else CHECK(got->normal == want->normal);
    }
    CHECK(vertex_hits > 10);
  }
}
