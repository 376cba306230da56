#include <gtest/gtest.h>

#include <set>

#include "spikerl/encoding.hpp"

using namespace spikerl;

namespace {
EncoderConfig with_window(int w) {
  EncoderConfig c;
  c.window = w;
  return c;
}
}  // namespace

TEST(Sections, Examples) {
  EXPECT_EQ(section_index(with_window(1), {4, 8}), 38);
  EXPECT_EQ(section_index(with_window(2), {1, 1}), 1);
  EXPECT_EQ(section_index(with_window(2), {3, 4}), 7);
  EXPECT_EQ(within_index(with_window(1), {5, 9}), 1);
  EXPECT_EQ(within_index(with_window(2), {1, 2}), 2);
  EXPECT_EQ(within_index(with_window(2), {2, 2}), 4);
}

TEST(Sections, InputCounts) {
  EXPECT_EQ(with_window(1).n_inputs(), 70);
  EXPECT_EQ(with_window(2).n_inputs(), 20);
  EXPECT_EQ(with_window(3).n_inputs(), 12);
  EXPECT_EQ(with_window(4).n_inputs(), 6);
}

TEST(Sections, InjectiveForEveryWindow) {
  for (int w = 1; w <= 10; ++w) {
    const EncoderConfig c = with_window(w);
    std::set<std::pair<int, int>> seen;
    for (int r = 1; r <= c.rows; ++r)
      for (int col = 1; col <= c.cols; ++col) {
        const int s = section_index(c, {r, col});
        const int in = within_index(c, {r, col});
        EXPECT_GE(s, 1);
        EXPECT_LE(s, c.n_inputs());
        EXPECT_GE(in, 1);
        EXPECT_LE(in, w * w);
        EXPECT_TRUE(seen.insert({s, in}).second);
      }
  }
}

TEST(Rates, WindowTwo) {
  const EncoderConfig c = with_window(2);
  const Cell cells[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  const double expected[] = {0.5, 0.5 + 0.5 / 3, 0.5 + 1.0 / 3, 1.0};
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(active_rate(c, cells[n]), expected[n], 1e-15);
}

TEST(Rates, WindowOneIsPMin) {
  EncoderConfig c;
  c.p_min = 0.3;
  EXPECT_EQ(active_rate(c, {6, 2}), 0.3);
}

TEST(Rates, SingleActiveEntry) {
  for (int w = 1; w <= 4; ++w) {
    const EncoderConfig c = with_window(w);
    for (int r = 1; r <= c.rows; ++r)
      for (int col = 1; col <= c.cols; ++col) {
        const auto v = rate_vector(c, {r, col});
        ASSERT_EQ(static_cast<int>(v.size()), c.n_inputs());
        int nonzero = 0;
        for (int i = 0; i < c.n_inputs(); ++i) {
          if (i + 1 == section_index(c, {r, col})) {
            EXPECT_GE(v[i], c.p_min);
            EXPECT_LE(v[i], c.p_max);
            ++nonzero;
          } else {
            EXPECT_EQ(v[i], 0.0);
          }
        }
        EXPECT_EQ(nonzero, 1);
      }
  }
}

TEST(Encode, RateOneIsAllOnes) {
  EncoderConfig c;
  c.p_min = c.p_max = 1.0;
  Rng rng(3);
  const auto x = encode(c, {2, 3}, rng);
  const int active = section_index(c, {2, 3}) - 1;
  for (int i = 0; i < x.n_inputs(); ++i)
    for (int t = 0; t < x.horizon(); ++t) EXPECT_EQ(x.at(i, t), i == active ? 1 : 0);
}

TEST(Encode, EmpiricalRate) {
  EncoderConfig c;
  Rng rng(5);
  const auto x = encode(c, {4, 4}, 10000, rng);
  const int active = section_index(c, {4, 4}) - 1;
  const double mean = x.count() / 10000.0;
  EXPECT_GE(mean, 0.48);
  EXPECT_LE(mean, 0.52);
  int active_bits = 0;
  for (int t = 0; t < x.horizon(); ++t) active_bits += x.at(active, t);
  EXPECT_EQ(active_bits, x.count());
}

TEST(Encode, SeedReproducible) {
  EncoderConfig c = with_window(2);
  Rng a(9), b(9);
  for (int n = 0; n < 50; ++n) EXPECT_EQ(encode(c, {3, 3}, a), encode(c, {3, 3}, b));
}

TEST(Encode, CountThrough) {
  SpikeTrainBatch x(2, 4);
  x.set(0, 0, true);
  x.set(1, 2, true);
  x.set(1, 3, true);
  EXPECT_EQ(x.count_through(0), 1);
  EXPECT_EQ(x.count_through(2), 2);
  EXPECT_EQ(x.count(), 3);
}

TEST(EncoderConfig, Validation) {
  EncoderConfig c;
  c.p_min = 0.9;
  c.p_max = 0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = EncoderConfig{};
  c.window = 11;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.window = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
