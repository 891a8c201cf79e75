#include <gtest/gtest.h>

#include <set>

#include "ctvs/frechet.hpp"
#include "ctvs/homeomorphism.hpp"
#include "ctvs/signals.hpp"
#include "oracles.hpp"

using namespace ctvs;
using ctvs::testing::direct_frechet;
using ctvs::testing::permuted;
using ctvs::testing::random_permutation;
using ctvs::testing::random_signal;

TEST(TruncationSeminorm, PartialSumsOfRearrangement) {
  const Signal x = make_real_signal({3, -1, 2});
  EXPECT_EQ(truncation_seminorm(x, 1), 3.0);
  EXPECT_EQ(truncation_seminorm(x, 2), 5.0);
  EXPECT_EQ(truncation_seminorm(x, 3), 6.0);
  EXPECT_EQ(truncation_seminorm(x, 50), lp_norm(x, 1.0));
}

TEST(TruncationSeminorm, ZeroSignal) {
  const Signal zero = make_real_signal(std::vector<double>(8, 0.0));
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(truncation_seminorm(zero, k), 0.0);
}

TEST(TruncationSeminorm, OrderZeroIsRejected) {
  EXPECT_THROW(truncation_seminorm(make_real_signal({1.0}), 0), InvalidArgument);
}

TEST(SeminormFamily, SeminormAxiomsAndMonotonicity) {
  std::mt19937_64 rng(21);
  const auto family = SeminormFamily::truncation(16);
  for (int trial = 0; trial < 200; ++trial) {
    const Signal x = random_signal(16, rng);
    const Signal y = random_signal(16, rng);
    const Complex c(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
    for (std::size_t k = 1; k <= 16; ++k) {
      if (k < 16) EXPECT_LE(family(x, k), family(x, k + 1));
      EXPECT_NEAR(family(Signal(c * x.values), k), std::abs(c) * family(x, k), 1e-12 * std::abs(c) * family(x, k));
      EXPECT_LE(family(Signal(x.values + y.values), k), family(x, k) + family(y, k) + 1e-12);
    }
  }
}

TEST(SeminormFamily, SeparatingAtFullOrder) {
  const auto family = SeminormFamily::truncation(4);
  EXPECT_EQ(family(make_real_signal({0, 0, 0, 0}), 4), 0.0);
  EXPECT_GT(family(make_real_signal({0, 0, 1e-300, 0}), 4), 0.0);
  EXPECT_THROW(family(make_real_signal({0, 0, 0, 0}), 5), InvalidArgument);
}

TEST(FrechetMetric, IdentityOfIndiscernibles) {
  std::mt19937_64 rng(22);
  const Signal x = random_signal(30, rng);
  EXPECT_EQ(frechet_metric(x, x, 30), 0.0);
}

TEST(FrechetMetric, UnitSpikeClosedForm) {
  for (std::size_t order : {1u, 5u, 10u, 30u}) {
    CVector x = CVector::Zero(20);
    x[7] = 1.0;
    const double d = frechet_metric(Signal(x), Signal(CVector::Zero(20)), order);
    EXPECT_DOUBLE_EQ(d, 0.5 * (1.0 - std::ldexp(1.0, -static_cast<int>(order))));
  }
}

TEST(FrechetMetric, AgreesWithDefinition) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Signal x = random_signal(24, rng, 3.0);
    const Signal y = random_signal(24, rng, 0.1);
    for (std::size_t order : {1u, 7u, 24u, 40u}) EXPECT_NEAR(frechet_metric(x, y, order), direct_frechet(x.values, y.values, order), 1e-14);
  }
}

TEST(FrechetMetric, FamilyOverloadMatchesFastPath) {
  std::mt19937_64 rng(24);
  const auto family = SeminormFamily::truncation(12);
  const Signal x = random_signal(12, rng);
  const Signal y = random_signal(12, rng);
  EXPECT_DOUBLE_EQ(frechet_metric(family, x, y), frechet_metric(x, y, 12));
}

TEST(FrechetMetric, DimensionMismatch) {
  try {
    frechet_metric(make_real_signal({1, 2}), make_real_signal({1, 2, 3}), 2);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "dimension mismatch");
  }
}

TEST(FrechetMetric, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  const std::size_t order = 64;
  for (int trial = 0; trial < 1000; ++trial) {
    const Signal x = random_signal(64, rng, scale(rng));
    const Signal y = random_signal(64, rng, scale(rng));
    const Signal z = random_signal(64, rng, scale(rng));
    const double dxy = frechet_metric(x, y, order);
    EXPECT_GE(dxy, 0.0);
    EXPECT_LT(dxy, 1.0);
    EXPECT_EQ(dxy, frechet_metric(y, x, order));
    EXPECT_LE(frechet_metric(x, z, order), dxy + frechet_metric(y, z, order) + 1e-12);
    EXPECT_NEAR(frechet_metric(Signal(x.values + z.values), Signal(y.values + z.values), order), dxy, 1e-12);
  }
}

TEST(FrechetMetric, RearrangementInvarianceOfDifference) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    const Signal x = random_signal(32, rng);
    const Signal y = random_signal(32, rng);
    const auto p = random_permutation(32, rng);
    const Signal diff(x.values - y.values);
    const Signal pdiff(permuted(x, p).values - permuted(y, p).values);
    for (std::size_t k = 1; k <= 32; ++k) EXPECT_EQ(truncation_seminorm(pdiff, k), truncation_seminorm(diff, k));
  }
}

TEST(FrechetMetric, MonotoneAndBoundedInOrder) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    const Signal x = random_signal(16, rng);
    const Signal y = random_signal(16, rng);
    for (std::size_t order = 1; order < 40; ++order) {
      const double d = frechet_metric(x, y, order);
      const double next = frechet_metric(x, y, order + 1);
      EXPECT_GE(next, d);
      EXPECT_LE(next - d, std::ldexp(1.0, -static_cast<int>(order)));
      EXPECT_LE(d, 1.0 - std::ldexp(1.0, -static_cast<int>(order)));
    }
  }
}

TEST(Kothe, IdentityDictionaryRecoversSpike) {
  const Dictionary id = make_dictionary(DictionaryKind::Identity, 8, 8, {}, 0);
  CVector y = CVector::Zero(8);
  y[3] = 5.0;
  const auto kothe = kothe_from_measurement(Measurement{y, id.id(), 0.0}, id);
  EXPECT_EQ(kothe.sequence.magnitudes[0], 5.0);
  EXPECT_EQ(kothe.sequence.permutation[0], 3u);
  for (std::size_t j = 1; j < 8; ++j) EXPECT_EQ(kothe.sequence.magnitudes[j], 0.0);
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_EQ(kothe.seminorm(k), 5.0);
}

TEST(Kothe, ZeroMeasurement) {
  const Dictionary id = make_dictionary(DictionaryKind::Identity, 6, 6, {}, 0);
  const auto kothe = kothe_from_measurement(Measurement{CVector::Zero(6), id.id(), 0.0}, id);
  for (double g : kothe.sequence.magnitudes) EXPECT_EQ(g, 0.0);
}

TEST(Kothe, DefaultMatrixIsTruncation) {
  std::mt19937_64 rng(28);
  const Dictionary dict = make_dictionary(DictionaryKind::Gaussian, 10, 20, {}, 4);
  const Measurement y{ctvs::testing::random_vector(10, rng), dict.id(), 0.0};
  const auto kothe = kothe_from_measurement(y, dict);
  EXPECT_NO_THROW(validate_kothe_matrix(kothe.weights));
  EXPECT_EQ(kothe.max_order(), 20u);
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_NEAR(kothe.seminorm(k), truncation_seminorm(kothe.sequence, k), 1e-12);
}

TEST(Kothe, CorrelationsMatchDirectComputation) {
  std::mt19937_64 rng(29);
  CMatrix a = CMatrix::Random(6, 9);
  a.col(2) *= 7.0;  // atoms need not be normalized
  const Dictionary dict(a, DictionaryKind::Custom);
  const CVector y = ctvs::testing::random_vector(6, rng);
  const auto kothe = kothe_from_measurement(Measurement{y, dict.id(), 0.0}, dict);
  std::vector<double> g;
  for (int j = 0; j < 9; ++j) {
    Complex dot = 0.0;
    double norm2 = 0.0;
    for (int i = 0; i < 6; ++i) {
      dot += std::conj(a(i, j)) * y[i];
      norm2 += std::norm(a(i, j));
    }
    g.push_back(std::abs(dot) / std::sqrt(norm2));
  }
  std::sort(g.begin(), g.end(), std::greater<>());
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(kothe.sequence.magnitudes[j], g[j], 1e-12 * g[0]);
}

TEST(Kothe, SingleAtomHasTheLargestNormalizedCorrelation) {
  // Cauchy-Schwarz: |<a_j, c a_i>| / |a_j| <= |c| |a_i|, equal only for collinear atoms.
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, 127);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dictionary dict = make_dictionary(DictionaryKind::Gaussian, 40, 128, {}, 1000 + seed);
    const std::size_t planted = pick(rng);
    CVector x = CVector::Zero(128);
    x[static_cast<Eigen::Index>(planted)] = Complex(1.5, -0.5);
    const auto kothe = kothe_from_measurement(forward(Signal(x), dict, 0.0, 0), dict);
    EXPECT_EQ(kothe.sequence.permutation[0], planted);
    EXPECT_NEAR(kothe.sequence.magnitudes[0], std::abs(x[static_cast<Eigen::Index>(planted)]) * dict.column_norms()[static_cast<Eigen::Index>(planted)], 1e-12);
  }
}

TEST(Kothe, PureToneOnFourierAtomsHasOneDominantCorrelation) {
  const std::vector<ChirpComponent> tone{{1.0, 5.0 / 64.0, 0.0}};
  DictionaryParams fourier;
  fourier.dft_sign = 1;
  const Dictionary dict = make_dictionary(DictionaryKind::Dft, 64, 64, fourier, 0);
  // Sensing with the identity leaves y = x; the Fourier atoms then analyse it.
  Measurement y;
  y.values = gen_chirp(tone, 64).values;
  const auto kothe = kothe_from_measurement(y, dict);
  EXPECT_EQ(kothe.sequence.permutation[0], 5u);
  EXPECT_NEAR(kothe.sequence.magnitudes[0], 8.0, 1e-12);
  EXPECT_LT(kothe.sequence.magnitudes[1], 1e-12);
}

TEST(Kothe, ErrorPaths) {
  CMatrix a = CMatrix::Identity(4, 4);
  a.col(2).setZero();
  try {
    Dictionary bad(a, DictionaryKind::Custom);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "degenerate atom 2");
  }
  const Dictionary id = make_dictionary(DictionaryKind::Identity, 4, 4, {}, 0);
  const Measurement y{CVector::Ones(4), id.id(), 0.0};
  EXPECT_THROW(kothe_from_measurement(y, id, 3), InvalidArgument);
  EXPECT_THROW(kothe_from_measurement(Measurement{CVector::Ones(3), "", 0.0}, id), InvalidArgument);
}

TEST(Kothe, CustomWeightsAreValidated) {
  const Dictionary id = make_dictionary(DictionaryKind::Identity, 3, 3, {}, 0);
  const auto kothe = kothe_from_measurement(Measurement{CVector::Ones(3), id.id(), 0.0}, id);
  Eigen::MatrixXd weighted(2, 3);
  weighted << 1, 0.5, 0.25, 2, 1, 0.5;
  const auto custom = with_kothe_weights(kothe, weighted);
  EXPECT_DOUBLE_EQ(custom.seminorm(2), 3.5);

  Eigen::MatrixXd decreasing(2, 3);
  decreasing << 1, 1, 1, 0.5, 1, 1;
  EXPECT_THROW(with_kothe_weights(kothe, decreasing), InvalidArgument);
  Eigen::MatrixXd empty_column(2, 3);
  empty_column << 1, 0, 1, 1, 0, 1;
  EXPECT_THROW(with_kothe_weights(kothe, empty_column), InvalidArgument);
}

TEST(FrechetIncrements, VanishBeyondSparsity) {
  const auto r = rearrange(std::vector<double>{0, 2, 0, 1, 0, 0, 3});
  const auto delta = frechet_increments(r, 64);
  for (std::size_t n = 3; n < delta.size(); ++n) EXPECT_EQ(delta[n], 0.0);
  EXPECT_GT(delta[2], 0.0);
}

TEST(FrechetIncrements, UnitAtomApproachesHalf) {
  const auto r = rearrange(std::vector<double>{1, 1});
  EXPECT_DOUBLE_EQ(frechet_increments(r, 64)[0], 0.5);
  EXPECT_DOUBLE_EQ(frechet_increments(r, 3)[0], 0.5 * (1 - 0.125));
}

TEST(FrechetIncrements, EqualMetricBetweenPartialObjects) {
  std::mt19937_64 rng(30);
  const auto r = rearrange(random_signal(20, rng));
  const auto delta = frechet_increments(r, 20);
  CVector partial = CVector::Zero(20);
  for (std::size_t n = 0; n < 20; ++n) {
    const Signal before(partial);
    partial[static_cast<Eigen::Index>(n)] = r.magnitudes[n];
    EXPECT_NEAR(delta[n], direct_frechet(partial, before.values, 20), 1e-15);
  }
}

TEST(FrechetIncrements, NonIncreasing) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto delta = frechet_increments(rearrange(random_signal(50, rng)), 50);
    for (std::size_t n = 1; n < delta.size(); ++n) EXPECT_LE(delta[n], delta[n - 1]);
  }
}
