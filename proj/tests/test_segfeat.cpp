#include "bos/segfeat.hpp"

#include "naive_features.hpp"
#include "test_support.hpp"

#include <cmath>

namespace bos {
namespace {

using test::expect_error;

FeatureTrack constant_track(Eigen::Index n, double value = 0.25) {
  FeatureTrack t;
  t.video_id = "c";
  for (Eigen::Index i = 0; i < n; ++i) {
    FrameRecord r;
    r.frame_index = i;
    r.values.setConstant(value);
    r.values(kAu45) = 0.0;
    t.push_back(r);
  }
  return t;
}

TEST(DiffSeries, Definition) {
  Eigen::VectorXd x(4);
  x << 0, 1, 3, 6;
  const Eigen::VectorXd v = diff_series(x);
  EXPECT_EQ(v, (Eigen::VectorXd(3) << 1, 2, 3).finished());
  EXPECT_EQ(diff_series(v), (Eigen::VectorXd(2) << 1, 1).finished());
  EXPECT_EQ(diff_series(Eigen::Vector3d(5, 5, 5)), Eigen::VectorXd::Zero(2));
  expect_error(ErrorCode::kSeriesTooShort, [] { diff_series(Eigen::VectorXd::Ones(1)); });
}

TEST(BlinkRate, IsolatedPeaks) {
  Eigen::VectorXd a(6);
  a << 0, 2, 0, 0, 3, 0;
  EXPECT_DOUBLE_EQ(blink_rate(a, 1.0), 2.0 / 6.0);
}

TEST(BlinkRate, PlateauCountedOnce) {
  Eigen::VectorXd a(6);
  a << 0, 2, 2, 2, 0, 0;
  EXPECT_DOUBLE_EQ(blink_rate(a, 1.0), 1.0 / 6.0);
}

TEST(BlinkRate, ZerosAndEdges) {
  EXPECT_EQ(blink_rate(Eigen::VectorXd::Zero(10), 0.5), 0.0);
  Eigen::VectorXd edge(3);
  edge << 3, 0, 3; // maxima at the ends have one neighbour only
  EXPECT_EQ(blink_rate(edge, 1.0), 0.0);
}

TEST(BlinkRate, MatchesNaiveAndStaysBelowHalf) {
  Rng rng(17);
  for (int rep = 0; rep < 500; ++rep) {
    const auto n = static_cast<Eigen::Index>(1 + rng.index(40));
    Eigen::VectorXd a(n);
    std::vector<double> v;
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i) = std::floor(rng.uniform(0.0, 4.0)); // coarse values produce plateaus
      v.push_back(a(i));
    }
    const double r = blink_rate(a, 1.5);
    EXPECT_DOUBLE_EQ(r, test::naive_blink_rate(v, 1.5));
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 0.5);
  }
}

TEST(SegmentTrack, PaperLengths) {
  const auto t = constant_track(2400);
  EXPECT_EQ(segment_track(t, {200}).size(), 12u);
  EXPECT_EQ(segment_track(constant_track(2401), {200}).size(), 12u);
  expect_error(ErrorCode::kTrackTooShort, [] { segment_track(constant_track(199), {200}); });
  expect_error(ErrorCode::kSegmentTooShort, [] { segment_track(constant_track(10), {2}); });
}

TEST(SegmentTrack, ContiguousInOrder) {
  Rng rng(2);
  const auto t = test::random_track(rng, 1000);
  const auto slices = segment_track(t, {75});
  ASSERT_EQ(slices.size(), 13u);
  for (std::size_t s = 0; s < slices.size(); ++s) {
    ASSERT_EQ(slices[s].rows(), 75);
    EXPECT_EQ(slices[s].row(0), t.channels.row(static_cast<Eigen::Index>(s) * 75));
    EXPECT_EQ(slices[s].row(74), t.channels.row(static_cast<Eigen::Index>(s) * 75 + 74));
  }
}

TEST(SegmentTrack, RequiresRepairedTrack) {
  auto t = constant_track(400);
  t.valid[3] = false;
  expect_error(ErrorCode::kMalformedInput, [&] { segment_track(t, {200}); });
}

TEST(SegmentFeatures, ConstantSliceIsZeroExceptMeans) {
  const auto t = constant_track(50, 0.25);
  const auto f = compute_segment_features(t.channels);
  EXPECT_DOUBLE_EQ(f(0), 0.25);
  EXPECT_DOUBLE_EQ(f(2), 0.25);
  for (int i : {1, 3, 4}) EXPECT_EQ(f(i), 0.0);
  for (int i = 5; i < kSegmentDims; ++i) EXPECT_EQ(f(i), 0.0) << i;
}

TEST(SegmentFeatures, ValenceStatistics) {
  ChannelMatrix m = ChannelMatrix::Zero(4, kNumChannels);
  m.col(kValence) << 0.0, 0.2, 0.4, 0.6;
  const auto f = compute_segment_features(m);
  EXPECT_NEAR(f(0), 0.3, 1e-15);
  EXPECT_NEAR(f(1), std::sqrt(0.05), 1e-15); // population std of 0,.2,.4,.6
}

TEST(SegmentFeatures, GazeDynamics) {
  ChannelMatrix m = ChannelMatrix::Zero(4, kNumChannels);
  m.col(kGazeX) << 0, 1, 3, 6;
  const auto f = compute_segment_features(m);
  EXPECT_DOUBLE_EQ(f(5), 2.0);
  EXPECT_NEAR(f(6), std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(f(7), 1.0);
  EXPECT_DOUBLE_EQ(f(8), 0.0);
}

TEST(SegmentFeatures, TooShort) {
  expect_error(ErrorCode::kSegmentTooShort,
               [] { compute_segment_features(ChannelMatrix::Zero(2, kNumChannels)); });
}

// Varying one channel at a time must light up exactly its documented slots.
TEST(SegmentFeatures, SlotLayout) {
  const auto &names = segment_feature_names();
  EXPECT_EQ(names[0], "valence_mean");
  EXPECT_EQ(names[4], "blink_rate");
  EXPECT_EQ(names[5], "gaze_x_vel_mean");
  EXPECT_EQ(names[48], "wrist_z_acc_std");

  ChannelMatrix ramp = ChannelMatrix::Zero(6, kNumChannels);
  Eigen::VectorXd quad(6);
  quad << 0, 1, 4, 9, 16, 25;
  for (int c = 0; c < kNumChannels; ++c) {
    ChannelMatrix m = ramp;
    m.col(c) = c == kValence || c == kArousal ? Eigen::VectorXd(quad / 40.0) : quad;
    const auto f = compute_segment_features(m);
    std::vector<int> nonzero;
    for (int i = 0; i < kSegmentDims; ++i) {
      if (f(i) != 0.0) nonzero.push_back(i);
    }
    if (c == kValence) {
      EXPECT_EQ(nonzero, (std::vector<int>{0, 1}));
    } else if (c == kArousal) {
      EXPECT_EQ(nonzero, (std::vector<int>{2, 3}));
    } else if (c == kAu45) {
      EXPECT_TRUE(nonzero.empty()); // monotone ramp has no interior peak
    } else {
      const auto pos = std::find(kDynamicChannels.begin(), kDynamicChannels.end(), c) - kDynamicChannels.begin();
      const int base = 5 + 4 * static_cast<int>(pos);
      // Acceleration of a quadratic is constant, so its std slot stays zero.
      EXPECT_EQ(nonzero, (std::vector<int>{base, base + 1, base + 2})) << kChannelNames[static_cast<std::size_t>(c)];
    }
  }
  ChannelMatrix blink = ramp;
  blink.col(kAu45) << 0, 0, 3, 0, 0, 0;
  const auto fb = compute_segment_features(blink);
  EXPECT_DOUBLE_EQ(fb(4), 1.0 / 6.0);
  EXPECT_EQ((fb.array() != 0.0).count(), 1);
}

TEST(SegmentFeatures, MatchesNaiveReference) {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = test::random_track(rng, static_cast<Eigen::Index>(3 + rng.index(300)));
    const auto f = compute_segment_features(t.channels, 0.5);
    const auto ref = test::naive_features(t.channels, 0.5);
    for (int i = 0; i < kSegmentDims; ++i) {
      ASSERT_NEAR(f(i), ref[static_cast<std::size_t>(i)], 1e-12) << "slot " << i;
      if (segment_feature_names()[static_cast<std::size_t>(i)].ends_with("_std")) {
        ASSERT_GE(f(i), 0.0);
      }
    }
    ASSERT_GE(f(4), 0.0);
    ASSERT_LE(f(4), 0.5);
  }
}

TEST(SegmentFeatures, ShiftInvariantDynamics) {
  Rng rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = test::random_track(rng, 120);
    const auto base = compute_segment_features(t.channels);
    for (int c : kDynamicChannels) {
      ChannelMatrix shifted = t.channels;
      shifted.col(c).array() += rng.uniform(-100.0, 100.0);
      const auto f = compute_segment_features(shifted);
      const auto pos = std::find(kDynamicChannels.begin(), kDynamicChannels.end(), c) - kDynamicChannels.begin();
      const int slot = 5 + 4 * static_cast<int>(pos);
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(f(slot + k), base(slot + k), 1e-9);
    }
  }
}

TEST(SegmentFeatures, TimeReversal) {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = test::random_track(rng, 90);
    const ChannelMatrix rev = t.channels.colwise().reverse();
    const auto f = compute_segment_features(t.channels);
    const auto r = compute_segment_features(rev);
    EXPECT_EQ(r(4), f(4));
    for (std::size_t p = 0; p < kDynamicChannels.size(); ++p) {
      const int slot = 5 + 4 * static_cast<int>(p);
      EXPECT_NEAR(r(slot), -f(slot), 1e-12);
      EXPECT_NEAR(r(slot + 1), f(slot + 1), 1e-12);
    }
  }
}

TEST(ExtractSegmentFeatures, OneRowPerSegment) {
  Rng rng(37);
  const auto t = test::random_track(rng, 650);
  const auto x = extract_segment_features(t, {200});
  ASSERT_EQ(x.rows(), 3);
  ASSERT_EQ(x.cols(), kSegmentDims);
  const SegmentFeatures second = compute_segment_features(t.channels.middleRows(200, 200));
  EXPECT_EQ(x.row(1).transpose(), second);
}

TEST(ExtractSegmentFeatures, CsvDump) {
  Rng rng(41);
  const auto t = test::random_track(rng, 400);
  const auto csv = format_segment_features_csv({"a"}, {extract_segment_features(t, {200})});
  EXPECT_TRUE(csv.starts_with("video_id,segment_index,valence_mean,"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\na,1,"), std::string::npos);
}

} // namespace
} // namespace bos
