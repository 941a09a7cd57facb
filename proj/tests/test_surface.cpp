#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "parasurf/surface.hpp"

using namespace parasurf;

TEST(Origami, TorusHasGenusOneAndNoCones) {
  auto t = load_origami("name=torus\nsquares=1\nh=1\nv=1\n");
  EXPECT_EQ(t->genus(), 1);
  EXPECT_TRUE(t->cone_points().empty());
  EXPECT_DOUBLE_EQ(t->area(), 1.0);
  EXPECT_TRUE(t->is_torus());
}

TEST(Origami, LShapeHasOneConeOfAngleSixPi) {
  // h=(1 2)(3), v=(1 3)(2). By hand, the commutator v h v^-1 h^-1 sends
  // 1 -> 3 -> 2 -> 1, a single 3-cycle, so one vertex with k = 2.
  auto l = load_origami("name=L3\nsquares=3\nh=(1 2)(3)\nv=(1 3)(2)\n");
  EXPECT_EQ(l->genus(), 2);
  ASSERT_EQ(l->cone_points().size(), 1u);
  EXPECT_EQ(l->cone_points()[0].k, 2);
  EXPECT_EQ(l->n_vertices(), 1);
  // every corner of every square is the cone point
  for (int s = 0; s < 3; ++s) EXPECT_TRUE(l->is_cone_corner(s, Corner::TopRight));
  EXPECT_EQ(l->corners_of_vertex(0).size(), 12u);
}

TEST(Origami, ImageAndCycleNotationsAgree) {
  auto a = load_origami("h=2,1,3\nv=3,2,1\n");
  auto b = load_origami("squares=3\nh=(1 2)(3)\nv=(1 3)(2)\n");
  EXPECT_EQ(a->h(), b->h());
  EXPECT_EQ(a->v(), b->v());
  EXPECT_EQ(make_l3()->h(), a->h());
}

TEST(Origami, CommentsAreIgnored) {
  auto t = load_origami("# a torus\nname = t  # trailing\nh=1\n\nv=1\n");
  EXPECT_EQ(t->name(), "t");
}

TEST(Origami, Errors) {
  auto code = [](const std::string& text) {
    try {
      load_origami(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;  // sentinel: nothing thrown
  };
  EXPECT_EQ(code("h=2,2,3\nv=1,2,3\n"), ErrorCode::NotAPermutation);
  EXPECT_EQ(code("h=1,2,4\nv=1,2,3\n"), ErrorCode::NotAPermutation);
  EXPECT_EQ(code("h=1,2\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("h=1,x\nv=1,2\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("colour=red\nh=1\nv=1\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("h=1 2\nv=1\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("squares=2\nh=1\nv=1\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("just text\n"), ErrorCode::ParseError);
  // two disjoint tori
  EXPECT_EQ(code("h=1,2\nv=1,2\n"), ErrorCode::ParseError);
}

TEST(Origami, GenusFromCommutatorMatchesEuler) {
  // 2x1 rectangle torus, 3-square staircase-free strip and the L shape
  EXPECT_EQ(load_origami("h=2,1\nv=1,2\n")->genus(), 1);
  EXPECT_EQ(load_origami("h=2,3,1\nv=1,2,3\n")->genus(), 1);
  auto e = load_origami("h=2,3,4,1\nv=2,1,4,3\n");  // 4-square origami
  int sum_k = 0;
  for (const auto& c : e->cone_points()) sum_k += c.k;
  EXPECT_EQ(sum_k, 2 * e->genus() - 2);
}

TEST(StraightFlow, TorusExamples) {
  auto t = make_torus();
  auto p = straight_flow(*t, Direction{1.0, 0.0}, SurfacePoint{0, 0.25, 0.5}, 0.5);
  EXPECT_EQ(p.square, 0);
  EXPECT_NEAR(p.x, 0.75, 1e-15);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
}

TEST(StraightFlow, LShapeCrossesToRightNeighbour) {
  auto l = make_l3();
  auto p = straight_flow(*l, Direction{1.0, 0.0}, SurfacePoint{0, 0.9, 0.5}, 0.2);
  EXPECT_EQ(p.square, l->right(0));
  EXPECT_EQ(p.square, 1);
  EXPECT_NEAR(p.x, 0.1, 1e-14);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
}

TEST(StraightFlow, ZeroTimeIsIdentity) {
  auto l = make_l3();
  SurfacePoint p{2, 0.3, 0.7};
  auto q = straight_flow(*l, golden_direction(), p, 0.0);
  EXPECT_EQ(q.square, p.square);
  EXPECT_EQ(q.x, p.x);
  EXPECT_EQ(q.y, p.y);
}

TEST(StraightFlow, TorusAgreesWithModularTranslation) {
  auto t = make_torus();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Direction d = golden_direction();
  for (int k = 0; k < 200; ++k) {
    SurfacePoint p{0, U(rng), U(rng)};
    const double time = 10.0 * U(rng);
    auto q = straight_flow(*t, d, p, time);
    auto wrap = [](double a) { return a - std::round(a); };
    EXPECT_LE(std::abs(wrap(q.x - (p.x + time * d.xi1))), 1e-14);
    EXPECT_LE(std::abs(wrap(q.y - (p.y + time * d.xi2))), 1e-14);
  }
}

TEST(StraightFlow, Additivity) {
  auto l = make_l3();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  const Direction d = golden_direction();
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    SurfacePoint p{static_cast<int>(rng() % 3), U(rng), U(rng)};
    const double t1 = 3.0 * U(rng), t2 = 3.0 * U(rng) - 1.5;
    try {
      auto a = straight_flow(*l, d, straight_flow(*l, d, p, t1), t2);
      auto b = straight_flow(*l, d, p, t1 + t2);
      auto diff = flat_difference(*l, a, b);
      ASSERT_TRUE(diff.has_value());
      EXPECT_LE(std::hypot((*diff)[0], (*diff)[1]), 1e-12);
      ++checked;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::HitsSingularity);
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(StraightFlow, TimeMapIsATranslation) {
  // unit Jacobian: nearby points keep their flat offset
  auto l = make_l3();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 0.9);
  const Direction d = golden_direction();
  const double delta = 1e-6;
  for (int k = 0; k < 100; ++k) {
    SurfacePoint p{static_cast<int>(rng() % 3), U(rng), U(rng)};
    SurfacePoint px = p, py = p;
    px.x += delta;
    py.y += delta;
    try {
      auto q = straight_flow(*l, d, p, 2.5);
      auto qx = straight_flow(*l, d, px, 2.5);
      auto qy = straight_flow(*l, d, py, 2.5);
      auto dx = flat_difference(*l, q, qx), dy = flat_difference(*l, q, qy);
      if (!dx || !dy) continue;
      const double det = ((*dx)[0] * (*dy)[1] - (*dx)[1] * (*dy)[0]) / (delta * delta);
      EXPECT_NEAR(det, 1.0, 1e-6);
    } catch (const Error&) {
    }
  }
}

TEST(StraightFlow, HitsSingularity) {
  auto l = make_l3();
  try {
    straight_flow(*l, Direction{1.0, 1.0}, SurfacePoint{0, 0.5, 0.5}, 0.75);
    FAIL() << "expected HitsSingularity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HitsSingularity);
  }
  // starting at the cone point itself
  EXPECT_THROW(straight_flow(*l, Direction{1.0, 0.3}, SurfacePoint{1, 0.0, 0.0}, 0.1), Error);
  // the torus has no singularities
  EXPECT_NO_THROW(straight_flow(*make_torus(), Direction{1.0, 1.0}, SurfacePoint{0, 0.5, 0.5}, 0.75));
}

TEST(Direction, MinDivisor) {
  Direction d{1.0, 1.0};
  EXPECT_EQ(d.min_divisor(3), 0.0);
  EXPECT_GT(golden_direction().min_divisor(32), 1e-3);
  EXPECT_THROW((Direction{0.0, 0.0}.validate()), Error);
}
