#include "bos/metrics.hpp"

#include "test_support.hpp"

#include <numeric>

namespace bos {
namespace {

using test::expect_error;

TEST(Evaluate, BinaryFixture) {
  // TP=2, FP=1, FN=1, TN=3
  const std::vector<int> truth = {1, 1, 0, 1, 0, 0, 0};
  const std::vector<int> pred = {1, 1, 1, 0, 0, 0, 0};
  const auto e = evaluate(truth, pred, 2);
  ASSERT_TRUE(e.binary);
  EXPECT_NEAR(e.accuracy, 5.0 / 7.0, 1e-12);
  EXPECT_NEAR(e.binary->precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.binary->recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.binary->f1, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(e.total, 7);
  EXPECT_EQ(e.confusion, (ConfusionMatrix(2, 2) << 3, 1, 1, 2).finished());
}

TEST(Evaluate, Perfect) {
  const std::vector<int> y = {0, 1, 1, 0, 1};
  const auto e = evaluate(y, y, 2);
  EXPECT_EQ(e.accuracy, 1.0);
  EXPECT_EQ(e.binary->precision, 1.0);
  EXPECT_EQ(e.binary->recall, 1.0);
  EXPECT_EQ(e.binary->f1, 1.0);
}

TEST(Evaluate, MajorityClassOnEngagementTestSplit) {
  std::vector<int> truth(72, 1);
  truth.insert(truth.end(), 57, 0);
  const std::vector<int> pred(129, 1);
  const auto e = evaluate(truth, pred, 2);
  EXPECT_NEAR(e.accuracy, 72.0 / 129.0, 1e-12);
  EXPECT_NEAR(e.accuracy, 0.558, 5e-4);
  EXPECT_EQ(e.binary->recall, 1.0);
}

TEST(Evaluate, UndefinedRatiosAreZeroWithWarning) {
  test::WarningCapture warnings;
  const auto e = evaluate({0, 0, 1}, {0, 0, 0}, 2);
  EXPECT_EQ(e.binary->precision, 0.0);
  EXPECT_EQ(e.binary->recall, 0.0);
  EXPECT_EQ(e.binary->f1, 0.0);
  EXPECT_EQ(warnings.messages.size(), 1u); // only precision is 0/0
}

TEST(Evaluate, MultiLevelHasNoBinaryScores) {
  const auto e = evaluate({0, 1, 2, 3, 3}, {0, 1, 1, 3, 2}, 4);
  EXPECT_FALSE(e.binary);
  EXPECT_DOUBLE_EQ(e.accuracy, 3.0 / 5.0);
  EXPECT_EQ(e.confusion.rows(), 4);
  EXPECT_EQ(e.confusion(3, 2), 1);
  EXPECT_EQ(e.confusion.sum(), 5);
}

TEST(Evaluate, Errors) {
  expect_error(ErrorCode::kLengthMismatch, [] { evaluate({0, 1}, {0}, 2); });
  expect_error(ErrorCode::kLengthMismatch, [] { evaluate({}, {}, 2); });
  expect_error(ErrorCode::kLabelOutOfRange, [] { evaluate({0, 2}, {0, 1}, 2); });
  expect_error(ErrorCode::kLabelOutOfRange, [] { evaluate({0, 1}, {0, -1}, 2); });
}

TEST(Evaluate, PropertiesOnRandomData) {
  test::WarningCapture quiet;
  Rng rng(1);
  for (int rep = 0; rep < 500; ++rep) {
    const int levels = 2 + static_cast<int>(rng.index(4));
    const auto n = 1 + rng.index(60);
    std::vector<int> truth, pred;
    for (std::uint64_t i = 0; i < n; ++i) {
      truth.push_back(static_cast<int>(rng.index(static_cast<std::uint64_t>(levels))));
      pred.push_back(static_cast<int>(rng.index(static_cast<std::uint64_t>(levels))));
    }
    const auto e = evaluate(truth, pred, levels);

    double indicator_mean = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) indicator_mean += truth[i] == pred[i];
    indicator_mean /= static_cast<double>(truth.size());
    EXPECT_NEAR(e.accuracy, indicator_mean, 1e-12);
    EXPECT_GE(e.accuracy, 0.0);
    EXPECT_LE(e.accuracy, 1.0);
    EXPECT_EQ(e.confusion.sum(), static_cast<int>(n));
    if (e.binary && e.confusion(1, 1) == 0) {
      EXPECT_EQ(e.binary->f1, 0.0);
    }

    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    std::vector<int> t2, p2;
    for (auto i : order) {
      t2.push_back(truth[i]);
      p2.push_back(pred[i]);
    }
    const auto e2 = evaluate(t2, p2, levels);
    EXPECT_EQ(e2.accuracy, e.accuracy);
    EXPECT_EQ(e2.confusion, e.confusion);
    if (e.binary) {
      EXPECT_EQ(e2.binary->precision, e.binary->precision);
      EXPECT_EQ(e2.binary->f1, e.binary->f1);
    }
  }
}

} // namespace
} // namespace bos
