#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "epd/geometry.hpp"
#include "epd/rng.hpp"
#include "support/oracles.hpp"

namespace {

using epd::AxisAlignedBox;
using epd::ExtremePoints;
using epd::Point;

// Quad whose points sit at the midpoints of the box sides.
ExtremePoints diamond(const AxisAlignedBox& b) {
    const Point c = b.center();
    return {{b.x_min, c.y}, {c.x, b.y_min}, {b.x_max, c.y}, {c.x, b.y_max}};
}

// Quad whose points sit at the box corners, starting from the top-left.
ExtremePoints corner_quad(const AxisAlignedBox& b) {
    return {{b.x_min, b.y_min}, {b.x_max, b.y_min}, {b.x_max, b.y_max}, {b.x_min, b.y_max}};
}

TEST(EnclosingBox, SpansTheExtremeCoordinates) {
    const ExtremePoints e = diamond({0.0, 0.0, 1.0, 1.0});
    const AxisAlignedBox b = enclosing_box(e);
    EXPECT_EQ(b.x_min, 0.0);
    EXPECT_EQ(b.y_min, 0.0);
    EXPECT_EQ(b.x_max, 1.0);
    EXPECT_EQ(b.y_max, 1.0);
    EXPECT_EQ(b.area(), 1.0);
}

TEST(EnclosingBox, PointQuadHasZeroArea) {
    const ExtremePoints e{{3.0, 4.0}, {3.0, 4.0}, {3.0, 4.0}, {3.0, 4.0}};
    EXPECT_EQ(enclosing_box(e).area(), 0.0);
}

TEST(RectIou, WorkedValues) {
    EXPECT_EQ(epd::rect_iou({0.0, 0.0, 1.0, 1.0}, {0.0, 0.0, 1.0, 1.0}), 1.0);
    EXPECT_NEAR(epd::rect_iou({0.0, 0.0, 1.0, 1.0}, {0.5, 0.0, 1.5, 1.0}), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(epd::rect_iou({0.0, 0.0, 4.0, 4.0}, {1.0, 1.0, 3.0, 3.0}), 0.25);
    EXPECT_EQ(epd::rect_iou({0.0, 0.0, 1.0, 1.0}, {2.0, 0.0, 3.0, 1.0}), 0.0);
}

TEST(RectIou, TouchingBoxesDoNotOverlap) {
    EXPECT_EQ(epd::rect_iou({0.0, 0.0, 1.0, 1.0}, {1.0, 0.0, 2.0, 1.0}), 0.0);
    EXPECT_EQ(epd::rect_iou({0.0, 0.0, 1.0, 1.0}, {0.0, 1.0, 1.0, 2.0}), 0.0);
}

TEST(RectIou, ZeroAreaBoxesCompareByIdentity) {
    const AxisAlignedBox pt{2.0, 3.0, 2.0, 3.0};
    EXPECT_EQ(epd::rect_iou(pt, pt), 1.0);
    EXPECT_EQ(epd::rect_iou(pt, {2.0, 4.0, 2.0, 4.0}), 0.0);
    // A zero-area box against a positive-area one has zero intersection area.
    EXPECT_EQ(epd::rect_iou(pt, {0.0, 0.0, 10.0, 10.0}), 0.0);
}

TEST(RectIou, SymmetricAndBounded) {
    for (int t = 0; t < 500; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 1, t);
        const AxisAlignedBox a = testsupport::random_box(s);
        const AxisAlignedBox b = testsupport::random_box(s);
        const double ab = epd::rect_iou(a, b);
        EXPECT_EQ(ab, epd::rect_iou(b, a));
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
    }
}

TEST(EdgeVectors, UnitDiamond) {
    const epd::QuadEdges q = epd::edge_vectors(diamond({0.0, 0.0, 1.0, 1.0}));
    EXPECT_EQ(q.e[0].x, 0.5);
    EXPECT_EQ(q.e[0].y, -0.5);
    EXPECT_EQ(q.e[1].x, 0.5);
    EXPECT_EQ(q.e[1].y, 0.5);
    EXPECT_EQ(q.e[2].x, -0.5);
    EXPECT_EQ(q.e[2].y, 0.5);
    EXPECT_EQ(q.e[3].x, -0.5);
    EXPECT_EQ(q.e[3].y, -0.5);
}

TEST(EdgeVectors, CycleClosesExactlyOnLatticeCoordinates) {
    for (int t = 0; t < 200; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 2, t);
        const ExtremePoints e = testsupport::to_lattice(testsupport::random_quad(s));
        const epd::QuadEdges q = epd::edge_vectors(e);
        const epd::Vec2 sum = q.e[0] + q.e[1] + q.e[2] + q.e[3];
        EXPECT_EQ(sum.x, 0.0);
        EXPECT_EQ(sum.y, 0.0);
    }
}

TEST(CosSim, IdenticalQuadsScoreExactlyOne) {
    for (int t = 0; t < 200; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 3, t);
        const ExtremePoints e = testsupport::random_quad(s);
        EXPECT_EQ(epd::cos_sim(e, e), 1.0);
    }
}

TEST(CosSim, DiamondAgainstStretchedDiamond) {
    // Every edge pair is (0.5,±0.5) against (1,±0.5): cosine 0.75/sqrt(0.625).
    const ExtremePoints a = diamond({0.0, 0.0, 1.0, 1.0});
    const ExtremePoints b = diamond({0.0, 0.0, 2.0, 1.0});
    EXPECT_NEAR(epd::cos_sim(a, b), 0.75 / std::sqrt(0.625), 1e-12);
}

TEST(CosSim, QuarterTurnLabelingIsOrthogonal) {
    // The same square traversed with labels advanced by one corner: every
    // edge pair is perpendicular, so the mean cosine vanishes exactly.
    const ExtremePoints a{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const ExtremePoints b{{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
    EXPECT_EQ(epd::cos_sim(a, b), 0.0);
}

TEST(CosSim, CollapsedEdgeRules) {
    const ExtremePoints pt{{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
    EXPECT_EQ(epd::cos_sim(pt, pt), 1.0);  // both collapsed on every pair
    const ExtremePoints d = diamond({0.0, 0.0, 1.0, 1.0});
    EXPECT_EQ(epd::cos_sim(pt, d), 0.0);  // one collapsed on every pair
    EXPECT_EQ(epd::cos_sim(d, pt), 0.0);
}

TEST(CosSim, SymmetricAndBounded) {
    for (int t = 0; t < 500; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 4, t);
        const ExtremePoints a = testsupport::random_quad(s);
        const ExtremePoints b = testsupport::random_quad(s);
        const double c = epd::cos_sim(a, b);
        EXPECT_EQ(c, epd::cos_sim(b, a));
        EXPECT_GE(c, -1.0);
        EXPECT_LE(c, 1.0);
    }
}

TEST(Eiou, IdentityIsExactlyOne) {
    for (int t = 0; t < 200; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 5, t);
        const ExtremePoints e = testsupport::random_quad(s);
        EXPECT_EQ(epd::eiou(e, e).eiou, 1.0);
    }
}

TEST(Eiou, ShiftedUnitSquare) {
    // Boxes overlap by half, edge directions agree perfectly.
    const ExtremePoints a = diamond({0.0, 0.0, 1.0, 1.0});
    const ExtremePoints b = diamond({0.5, 0.0, 1.5, 1.0});
    const epd::EiouBreakdown r = epd::eiou(a, b);
    EXPECT_NEAR(r.rect_iou, 1.0 / 3.0, 1e-12);
    EXPECT_EQ(r.cos_sim, 1.0);
    EXPECT_NEAR(r.eiou, 2.0 / 3.0, 1e-12);
}

TEST(Eiou, QuarterTurnLabeling) {
    // Identical footprint, orthogonal edge labeling: box term saturates,
    // shape term contributes only the 0.5 floor.
    const ExtremePoints a{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const ExtremePoints b{{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
    const epd::EiouBreakdown r = epd::eiou(a, b);
    EXPECT_EQ(r.rect_iou, 1.0);
    EXPECT_EQ(r.cos_sim, 0.0);
    EXPECT_NEAR(r.eiou, 0.75, 1e-12);
}

TEST(Eiou, BreakdownFieldsAreConsistent) {
    for (int t = 0; t < 300; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 6, t);
        const ExtremePoints a = testsupport::random_quad(s);
        const ExtremePoints b = testsupport::random_quad(s);
        const epd::EiouBreakdown r = epd::eiou(a, b);
        EXPECT_EQ(r.rect_iou, epd::rect_iou(enclosing_box(a), enclosing_box(b)));
        EXPECT_EQ(r.cos_sim, epd::cos_sim(a, b));
        EXPECT_EQ(r.eiou, 0.5 * (r.rect_iou + 0.5 * (1.0 + r.cos_sim)));
        EXPECT_GE(r.eiou, 0.0);
        EXPECT_LE(r.eiou, 1.0);
    }
}

TEST(Eiou, InvariantUnderSimilarityTransforms) {
    const std::array<double, 3> scales{0.1, 1.0, 17.3};
    for (int t = 0; t < 300; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 7, t);
        const ExtremePoints a = testsupport::random_quad(s);
        const ExtremePoints b = testsupport::random_quad(s);
        const double base = epd::eiou(a, b).eiou;
        for (double k : scales) {
            const double dx = s.uniform(-100.0, 100.0);
            const double dy = s.uniform(-100.0, 100.0);
            const double moved = epd::eiou(a.affine(k, dx, dy), b.affine(k, dx, dy)).eiou;
            EXPECT_NEAR(moved, base, 1e-9);
        }
    }
}

TEST(Eiou, AgreesWithRectIouOrderingForAlignedEqualAspectBoxes) {
    // Same-aspect axis-aligned diamonds have cosine 1, so eiou is an affine
    // function of the box overlap and preserves its ordering.
    epd::rng::Stream s = epd::rng::Stream::of(101, 8);
    const AxisAlignedBox gt{100.0, 100.0, 200.0, 150.0};
    std::vector<double> ious, eious;
    for (int t = 0; t < 50; ++t) {
        const double dx = s.uniform(-80.0, 80.0);
        const double dy = s.uniform(-40.0, 40.0);
        const AxisAlignedBox moved{gt.x_min + dx, gt.y_min + dy, gt.x_max + dx, gt.y_max + dy};
        const epd::EiouBreakdown r = epd::eiou(diamond(gt), diamond(moved));
        EXPECT_EQ(r.cos_sim, 1.0);
        ious.push_back(r.rect_iou);
        eious.push_back(r.eiou);
    }
    for (std::size_t i = 0; i < ious.size(); ++i) {
        for (std::size_t j = 0; j < ious.size(); ++j) {
            if (ious[i] < ious[j]) {
                EXPECT_LT(eious[i], eious[j]);
            }
        }
    }
}

TEST(QuadIouExact, WorkedValues) {
    const AxisAlignedBox unit{0.0, 0.0, 1.0, 1.0};
    EXPECT_NEAR(epd::quad_iou_exact(corner_quad(unit), corner_quad(unit)), 1.0, 1e-12);
    // The side-midpoint diamond covers exactly half the square.
    EXPECT_NEAR(epd::quad_iou_exact(corner_quad(unit), diamond(unit)), 0.5, 1e-12);
    EXPECT_EQ(epd::quad_iou_exact(diamond(unit), diamond({5.0, 5.0, 6.0, 6.0})), 0.0);
    // Axis-aligned corner quads reduce to plain box overlap.
    EXPECT_NEAR(epd::quad_iou_exact(corner_quad(unit), corner_quad({0.5, 0.0, 1.5, 1.0})),
                1.0 / 3.0, 1e-12);
}

TEST(QuadIouExact, RejectsDegenerateQuads) {
    const ExtremePoints flat{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    EXPECT_THROW(epd::quad_iou_exact(flat, diamond({0.0, 0.0, 1.0, 1.0})),
                 std::invalid_argument);
    EXPECT_THROW(epd::quad_iou_exact(diamond({0.0, 0.0, 1.0, 1.0}), flat),
                 std::invalid_argument);
}

TEST(QuadIouExact, MatchesMonteCarloEstimate) {
    for (int t = 0; t < 5; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 9, t);
        const AxisAlignedBox box_a = testsupport::random_box(s, 0.0, 400.0, 60.0, 200.0);
        AxisAlignedBox box_b = box_a;
        box_b.x_min += s.uniform(-25.0, 25.0);
        box_b.x_max += s.uniform(-25.0, 25.0);
        box_b.y_min += s.uniform(-25.0, 25.0);
        box_b.y_max += s.uniform(-25.0, 25.0);
        const ExtremePoints a = testsupport::random_quad_in_box(s, box_a);
        const ExtremePoints b = testsupport::random_quad_in_box(s, box_b);
        const double exact = epd::quad_iou_exact(a, b);
        const double mc = testsupport::mc_quad_iou(a, b, 200000, 7000 + t);
        EXPECT_NEAR(exact, mc, 5e-3);
    }
}

TEST(QuadIouExact, SymmetricOnRandomPairs) {
    for (int t = 0; t < 100; ++t) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 10, t);
        const ExtremePoints a = testsupport::random_quad(s);
        const ExtremePoints b = testsupport::random_quad(s);
        EXPECT_NEAR(epd::quad_iou_exact(a, b), epd::quad_iou_exact(b, a), 1e-12);
    }
}

TEST(Eiou, OrdersLikeExactOverlapOnShrinkingQuadFamily) {
    // Interpolating the corner quad toward the side-midpoint diamond shrinks
    // true overlap monotonically while the enclosing box stays fixed; both
    // metrics must rank the family identically.
    for (int bi = 0; bi < 5; ++bi) {
        epd::rng::Stream s = epd::rng::Stream::of(101, 11, bi);
        const AxisAlignedBox box = testsupport::random_box(s, 0.0, 500.0, 40.0, 180.0);
        const ExtremePoints a = corner_quad(box);
        const ExtremePoints d = diamond(box);
        std::vector<double> exact_iou, eiou_val;
        for (int k = 0; k <= 12; ++k) {
            const double t = 0.08 * k;
            std::array<double, 8> mix{};
            const std::array<double, 8> ca = a.to_array();
            const std::array<double, 8> cd = d.to_array();
            for (std::size_t i = 0; i < 8; ++i) mix[i] = (1.0 - t) * ca[i] + t * cd[i];
            const ExtremePoints bt = ExtremePoints::from_array(mix);
            exact_iou.push_back(epd::quad_iou_exact(a, bt));
            eiou_val.push_back(epd::eiou(a, bt).eiou);
        }
        for (std::size_t i = 1; i < exact_iou.size(); ++i) {
            EXPECT_LT(exact_iou[i], exact_iou[i - 1]);
            EXPECT_LT(eiou_val[i], eiou_val[i - 1]);
        }
    }
}

}  // namespace
