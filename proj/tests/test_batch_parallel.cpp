#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "epd/batch.hpp"
#include "epd/reference.hpp"
#include "epd/scenario.hpp"
#include "support/oracles.hpp"

namespace {

using epd::AssignmentTarget;
using epd::Detection;
using epd::ExtremePoints;
using epd::GroundTruthInstance;
using epd::batch::QuadPair;

const int kThreadCounts[] = {1, 3, 8};

std::vector<QuadPair> overlapping_pairs(std::uint64_t seed, std::size_t n) {
    std::vector<QuadPair> pairs(n);
    for (std::size_t i = 0; i < n; ++i) {
        epd::rng::Stream s = epd::rng::Stream::of(seed, 41, i);
        const epd::AxisAlignedBox box = testsupport::random_box(s);
        pairs[i].gt = testsupport::random_quad_in_box(s, box);
        // Mix overlapping, disjoint, and identical predictions.
        if (i % 7 == 0) {
            pairs[i].pred = pairs[i].gt;
        } else if (i % 7 == 1) {
            pairs[i].pred = pairs[i].gt.translated(3.0 * box.width(), 0.0);
        } else {
            pairs[i].pred = testsupport::random_quad_in_box(
                s, {box.x_min + s.uniform(-10.0, 10.0), box.y_min + s.uniform(-10.0, 10.0),
                    box.x_max + s.uniform(-10.0, 10.0), box.y_max + s.uniform(-10.0, 10.0)});
        }
    }
    return pairs;
}

void expect_same_targets(const std::vector<AssignmentTarget>& a,
                         const std::vector<AssignmentTarget>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].level, b[i].level);
        EXPECT_EQ(a[i].stride, b[i].stride);
        EXPECT_EQ(a[i].location.x, b[i].location.x);
        EXPECT_EQ(a[i].location.y, b[i].location.y);
        EXPECT_EQ(a[i].positive, b[i].positive);
        EXPECT_EQ(a[i].instance_id, b[i].instance_id);
        ASSERT_EQ(a[i].displacement.has_value(), b[i].displacement.has_value());
        if (a[i].displacement) {
            EXPECT_EQ(a[i].displacement->d, b[i].displacement->d);
        }
        EXPECT_FALSE(a[i].eiou_target.has_value());
        EXPECT_FALSE(b[i].eiou_target.has_value());
    }
}

void expect_same_detections(const std::vector<Detection>& a,
                            const std::vector<Detection>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].image_id, b[i].image_id);
        EXPECT_EQ(a[i].category, b[i].category);
        EXPECT_EQ(a[i].cls_confidence, b[i].cls_confidence);
        EXPECT_EQ(a[i].eiou_score, b[i].eiou_score);
        EXPECT_EQ(a[i].centerness, b[i].centerness);
        EXPECT_EQ(a[i].extremes.to_array(), b[i].extremes.to_array());
    }
}

class ThreadRestore {
  public:
    ~ThreadRestore() { epd::batch::set_threads(1); }
};

TEST(BatchEiou, MatchesTheSerialReferenceAtEveryThreadCount) {
    ThreadRestore restore;
    const std::vector<QuadPair> pairs = overlapping_pairs(2024, 500);
    const std::vector<epd::EiouBreakdown> want = epd::reference::eiou_batch(pairs);
    ASSERT_EQ(want.size(), pairs.size());
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        const std::vector<epd::EiouBreakdown> got = epd::batch::eiou_batch(pairs);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].rect_iou, want[i].rect_iou);
            EXPECT_EQ(got[i].cos_sim, want[i].cos_sim);
            EXPECT_EQ(got[i].eiou, want[i].eiou);
            const epd::EiouBreakdown scalar = epd::eiou(pairs[i].gt, pairs[i].pred);
            EXPECT_EQ(got[i].eiou, scalar.eiou);
        }
    }
}

TEST(BatchLoss, MatchesTheSerialReferenceAtEveryThreadCount) {
    ThreadRestore restore;
    const std::vector<QuadPair> pairs = overlapping_pairs(515, 400);
    const std::vector<epd::LossValue> want = epd::reference::loss_batch(pairs);
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        const std::vector<epd::LossValue> got = epd::batch::loss_batch(pairs);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].value, want[i].value);
            EXPECT_EQ(got[i].overlap_branch, want[i].overlap_branch);
        }
    }
}

TEST(BatchLoss, RejectsABadGtAnywhereInTheBatch) {
    std::vector<QuadPair> pairs = overlapping_pairs(99, 20);
    QuadPair bad;
    bad.gt = {{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};  // zero-area gt
    bad.pred = pairs[0].pred;
    pairs.push_back(bad);
    EXPECT_THROW(epd::batch::loss_batch(pairs), std::invalid_argument);
    EXPECT_THROW(epd::reference::loss_batch(pairs), std::invalid_argument);
}

TEST(BatchGrad, MatchesTheSerialReferenceAtEveryThreadCount) {
    ThreadRestore restore;
    std::vector<QuadPair> pairs(150);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        testsupport::gradcheck_pair(777, static_cast<std::uint64_t>(i), i % 5 == 4,
                                    pairs[i].gt, pairs[i].pred);
    }
    const std::vector<epd::LossGradient> want = epd::reference::grad_batch(pairs);
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        const std::vector<epd::LossGradient> got = epd::batch::grad_batch(pairs);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].d, want[i].d);
            EXPECT_EQ(got[i].d, epd::eiou_loss_grad(pairs[i].gt, pairs[i].pred).d);
        }
    }
}

TEST(BatchGrad, ValidatesPreconditionsBeforeComputing) {
    std::vector<QuadPair> pairs(10);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        testsupport::gradcheck_pair(778, static_cast<std::uint64_t>(i), false,
                                    pairs[i].gt, pairs[i].pred);
    }
    // Enclosing boxes touching edge-to-edge sit on the branch boundary.
    QuadPair boundary;
    boundary.gt = {{0.0, 5.0}, {5.0, 0.0}, {10.0, 5.0}, {5.0, 10.0}};
    boundary.pred = boundary.gt.translated(10.0, 0.0);
    std::vector<QuadPair> with_boundary = pairs;
    with_boundary.push_back(boundary);
    EXPECT_THROW(epd::batch::grad_batch(with_boundary), std::domain_error);
    EXPECT_THROW(epd::reference::grad_batch(with_boundary), std::domain_error);

    QuadPair bad_gt;
    bad_gt.gt = {{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
    bad_gt.pred = pairs[0].pred;
    std::vector<QuadPair> with_bad_gt = pairs;
    with_bad_gt.push_back(bad_gt);
    EXPECT_THROW(epd::batch::grad_batch(with_bad_gt), std::invalid_argument);
}

TEST(BatchThreads, SetThreadsAcceptsTheTestedRange) {
    ThreadRestore restore;
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        EXPECT_GE(epd::batch::max_threads(), 1);
    }
}

TEST(ParallelAssign, MatchesTheSerialReferenceAtEveryThreadCount) {
    ThreadRestore restore;
    std::vector<GroundTruthInstance> gts;
    for (std::uint64_t i = 0; i < 20; ++i) {
        epd::rng::Stream s = epd::rng::Stream::of(321, 43, i);
        GroundTruthInstance gt;
        gt.instance_id = static_cast<std::int64_t>(i + 1);
        gt.category = 1 + static_cast<int>(i % 3);
        gt.box = testsupport::random_box(s, 0.0, 640.0, 12.0, 400.0);
        gt.extremes = testsupport::random_quad_in_box(s, gt.box);
        gts.push_back(gt);
    }
    const std::vector<double> strides{8.0, 16.0, 32.0, 64.0, 128.0};
    const std::vector<AssignmentTarget> want =
        epd::reference::assign(gts, 640.0, 640.0, strides);
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        expect_same_targets(epd::assign(gts, 640.0, 640.0, strides), want);
    }
}

TEST(ParallelNms, MatchesTheSerialReferenceAtEveryThreadCount) {
    ThreadRestore restore;
    const std::vector<Detection> dets = testsupport::random_detections(57, 0, 60, 3, 2);
    for (epd::RankMode mode :
         {epd::RankMode::kPlain, epd::RankMode::kCenterness, epd::RankMode::kEiou}) {
        const std::vector<Detection> want = epd::reference::nms(dets, mode, 0.5, 0.05);
        for (int threads : kThreadCounts) {
            epd::batch::set_threads(threads);
            expect_same_detections(epd::nms(dets, mode, 0.5, 0.05), want);
        }
    }
}

TEST(ParallelScenario, GenerateScenarioIsThreadCountInvariant) {
    ThreadRestore restore;
    epd::ScenarioConfig cfg;
    cfg.images = 4;
    cfg.instances_per_image = 6;
    cfg.detections_per_gt = 2;
    cfg.sigma_jitter = 1.0;
    cfg.eiou_score_sigma = 0.1;

    epd::batch::set_threads(1);
    const epd::Scenario base = epd::generate_scenario(cfg, 12345);
    for (int threads : kThreadCounts) {
        epd::batch::set_threads(threads);
        const epd::Scenario sc = epd::generate_scenario(cfg, 12345);
        ASSERT_EQ(sc.gts.size(), base.gts.size());
        for (std::size_t i = 0; i < sc.gts.size(); ++i) {
            EXPECT_EQ(sc.gts[i].image_id, base.gts[i].image_id);
            EXPECT_EQ(sc.gts[i].gt.instance_id, base.gts[i].gt.instance_id);
            EXPECT_EQ(sc.gts[i].gt.category, base.gts[i].gt.category);
            EXPECT_EQ(sc.gts[i].gt.extremes.to_array(), base.gts[i].gt.extremes.to_array());
        }
        expect_same_detections(sc.detections, base.detections);
    }
}

}  // namespace
