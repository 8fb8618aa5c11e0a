#include <cmath>
#include <cstdint>
#include <set>

#include <gtest/gtest.h>

#include "twoway/montecarlo.hpp"
#include "twoway/philox.hpp"

using twoway::Philox4x32;
using twoway::RandomStream;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox4x32, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox4x32, KnownAnswerOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox4x32, KnownAnswerPi) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, GoldenFirstDrawsForDefaultSeed) {
  RandomStream stream(twoway::kDefaultSeed, 0);
  const std::uint64_t first[4] = {stream.next_u64(), stream.next_u64(), stream.next_u64(),
                                  stream.next_u64()};
  // Frozen from the first run of this generator; any change alters every
  // published Monte-Carlo number.
  EXPECT_EQ(first[0], 0x787170ef854cbfc4ull);
  EXPECT_EQ(first[1], 0xbc6e706fe3ddc62cull);
  EXPECT_EQ(first[2], 0x7d4fbbae1d87b0d5ull);
  EXPECT_EQ(first[3], 0x3127babe53b004f9ull);
}

TEST(RandomStream, ReplayIsIdentical) {
  RandomStream a(42, 3);
  RandomStream b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (std::uint64_t id = 0; id < 8; ++id) firsts.insert(RandomStream(seed, id).next_u64());
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RandomStream, UniformMoments) {
  RandomStream s(5, 0);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(RandomStream, ComplexNormalVariance) {
  RandomStream s(9, 1);
  const int n = 200000;
  std::complex<double> mean{0.0, 0.0};
  double power = 0.0;
  double real_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = s.complex_normal(3.0);
    mean += z;
    power += std::norm(z);
    real_sq += z.real() * z.real();
  }
  EXPECT_NEAR(std::abs(mean / double(n)), 0.0, 0.02);
  EXPECT_NEAR(power / n, 3.0, 0.05);
  EXPECT_NEAR(real_sq / n, 1.5, 0.03);  // circular symmetry: half the power per component
}
