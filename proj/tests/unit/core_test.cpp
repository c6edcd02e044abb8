#include <gtest/gtest.h>

#include <random>

#include "herd/core.hpp"

using namespace herd;

namespace {

Matrix mat2(double a, double b, double c, double d) { return (Matrix(2, 2) << a, b, c, d).finished(); }

MomentSummary<double> moments2(double var1, double var2, double cov12, double comono12) {
  return MomentSummary<double>(Vector::Zero(2), mat2(var1, cov12, cov12, var2), mat2(var1, comono12, comono12, var2));
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no herd::Error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(WeightedCov, TwoAssetHalfCorrelation) {
  EXPECT_DOUBLE_EQ(weighted_cov(Weights::equal(2), mat2(1, 0.5, 0.5, 1)), 1.0);
}

TEST(WeightedCov, DiagonalHasNoOffDiagonalMass) {
  const Matrix cov = Vector::LinSpaced(4, 1.0, 4.0).asDiagonal();
  EXPECT_EQ(weighted_cov(Weights::equal(4), cov), 0.0);
}

TEST(WeightedCov, ThreeAssetsEnumerated) {
  // Ordered pairs: 1*2, 1*3, 2*1, 2*3, 3*1, 3*2.
  Matrix cov = Matrix::Ones(3, 3);
  cov.diagonal() << 7, 8, 9;
  EXPECT_DOUBLE_EQ(weighted_cov(Weights((Vector(3) << 1, 2, 3).finished()), cov), 22.0);
}

TEST(WeightedCov, DimensionMismatch) {
  EXPECT_EQ(code_of([] { weighted_cov(Weights::equal(3), Matrix::Ones(2, 2)); }), ErrorCode::DimensionMismatch);
}

TEST(WeightedCov, AcceptsExpressions) {
  const Matrix a = mat2(1, 0.25, 0.25, 1);
  EXPECT_DOUBLE_EQ(weighted_cov(Weights::equal(2), 2.0 * a + a.transpose()), 1.5);
}

TEST(Cix, TwoAssetsGiveCorrelation) {
  for (double rho : {-0.7, -0.1, 0.0, 0.3, 0.95}) {
    const double s1 = 0.4, s2 = 2.5;
    const auto m = moments2(s1 * s1, s2 * s2, rho * s1 * s2, s1 * s2);
    for (double w2 : {0.1, 1.0, 17.0}) {
      EXPECT_NEAR(cix(Weights((Vector(2) << 1.3, w2).finished()), m).value, rho, 1e-15);
    }
  }
}

TEST(Cix, UncorrelatedIsZero) {
  const Matrix cov = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
  Matrix comono = cov;
  comono(0, 1) = comono(1, 0) = 0.5;
  const MomentSummary<double> m(Vector::Zero(3), cov, comono);
  EXPECT_EQ(cix(Weights((Vector(3) << 1, 2, 3).finished()), m).value, 0.0);
}

TEST(Cix, CounterMonotonicAttainsLowerBound) {
  // X2 = c - X1 with unit variances: cov = -1, the weighted sum is constant.
  const auto v = cix(Weights::equal(2), moments2(1, 1, -1, 1));
  EXPECT_DOUBLE_EQ(v.value, -1.0);
  EXPECT_DOUBLE_EQ(v.lower_bound, -1.0);
  EXPECT_DOUBLE_EQ(v.upper_bound, 1.0);
}

TEST(Cix, DegenerateDenominator) {
  const MomentSummary<double> m(Vector::Zero(2), mat2(1, 0, 0, 0), mat2(1, 0, 0, 0));
  EXPECT_EQ(code_of([&] { cix(Weights::equal(2), m); }), ErrorCode::DegenerateDenominator);
}

TEST(Hix, ComonotonicIsOne) {
  EXPECT_DOUBLE_EQ(hix(Weights((Vector(2) << 2, 5).finished()), moments2(1, 4, 2, 2)).value, 1.0);
}

TEST(Hix, ConstantSumIsZero) {
  EXPECT_DOUBLE_EQ(hix(Weights::equal(2), moments2(1, 1, -1, 1)).value, 0.0);
}

TEST(Hix, IndependentUnitVariances) {
  const auto v = hix(Weights::equal(2), moments2(1, 1, 0, 1));
  EXPECT_DOUBLE_EQ(v.value, 0.5);
  EXPECT_EQ(v.lower_bound, 0.0);
  EXPECT_EQ(v.upper_bound, 1.0);
}

TEST(Rhix, ComonotonicIsOne) {
  EXPECT_DOUBLE_EQ(rhix(Weights((Vector(2) << 3, 1).finished()), moments2(1, 9, 2.5, 2.5)).value, 1.0);
}

TEST(Rhix, UncorrelatedIsZero) {
  EXPECT_EQ(rhix(Weights::equal(2), moments2(1, 4, 0, 1.7)).value, 0.0);
}

TEST(Rhix, CounterMonotonicAttainsLowerBound) {
  const auto v = rhix(Weights::equal(2), moments2(1, 1, -1, 1));
  EXPECT_DOUBLE_EQ(v.value, -1.0);
  EXPECT_DOUBLE_EQ(v.lower_bound, -1.0);
  EXPECT_EQ(v.upper_bound, 1.0);
}

TEST(Rhix, DegenerateDenominator) {
  const auto m = moments2(1, 1, 0, 0);
  EXPECT_EQ(code_of([&] { rhix(Weights::equal(2), m); }), ErrorCode::DegenerateDenominator);
}

TEST(Evaluate, DispatchesOnKind) {
  const auto m = moments2(1, 1, 0.5, 1);
  const auto w = Weights::equal(2);
  EXPECT_EQ(evaluate(IndexKind::Cix, w, m).kind, IndexKind::Cix);
  EXPECT_DOUBLE_EQ(evaluate(IndexKind::Hix, w, m).value, 0.75);
  EXPECT_DOUBLE_EQ(evaluate(IndexKind::Rhix, w, m).value, 0.5);
  EXPECT_EQ(parse_index_kind("RHIX"), IndexKind::Rhix);
  EXPECT_EQ(to_string(IndexKind::Hix), "hix");
  EXPECT_EQ(code_of([] { parse_index_kind("cssd"); }), ErrorCode::InvalidConfig);
}

TEST(RhixFromVariances, EqualVariancesGiveOne) {
  EXPECT_DOUBLE_EQ(rhix_from_variances(3.7, 3.7, Weights::equal(2), Vector::Ones(2)), 1.0);
}

TEST(RhixFromVariances, NoCovarianceMassGivesZero) {
  const Weights w((Vector(2) << 2, 3).finished());
  const Vector vars = (Vector(2) << 1.5, 0.5).finished();
  EXPECT_EQ(rhix_from_variances(4 * 1.5 + 9 * 0.5, 20.0, w, vars), 0.0);
}

TEST(RhixFromVariances, HandExample) {
  EXPECT_DOUBLE_EQ(rhix_from_variances(3.0, 4.0, Weights::equal(2), Vector::Ones(2)), 0.5);
  EXPECT_DOUBLE_EQ(rhix(Weights::equal(2), moments2(1, 1, 0.5, 1)).value, 0.5);
}

TEST(RhixFromVariances, DegenerateDenominator) {
  EXPECT_EQ(code_of([] { rhix_from_variances(2.0, 2.0, Weights::equal(2), Vector::Ones(2)); }),
            ErrorCode::DegenerateDenominator);
}

TEST(MomentSummary, RejectsInvalidInputs) {
  EXPECT_EQ(code_of([] { moments2(1, 1, 0.5, 0.4); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { MomentSummary<double>(Vector::Zero(2), mat2(1, 0, 0, 1), mat2(2, 1, 1, 1)); }),
            ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { moments2(1, 1, 2, 2); }), ErrorCode::NotPositiveSemidefinite);
  EXPECT_EQ(code_of([] { MomentSummary<double>(Vector::Zero(1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { MomentSummary<double>(Vector::Zero(2), mat2(1, 0.1, 0.2, 1), mat2(1, 1, 1, 1)); }),
            ErrorCode::InvalidParameter);
}

TEST(EmpiricalComono, ComonotonicInputUnchanged) {
  Matrix x(5, 3);
  x.col(0) << 0.3, -1.0, 2.0, 0.7, 1.1;
  x.col(1) = x.col(0).array().exp();
  x.col(2) = 4.0 * x.col(0).array().cube() - 1.0;
  EXPECT_EQ(comonotonic_rearrangement(x), x);
  EXPECT_EQ(empirical_comono_cov(x), sample_cov(x));
}

TEST(EmpiricalComono, ReversedColumnsThreePoints) {
  Matrix x(3, 2);
  x << 1, 3, 2, 2, 3, 1;
  EXPECT_DOUBLE_EQ(sample_cov(x)(0, 1), -1.0);
  const Matrix c = empirical_comono_cov(x);
  EXPECT_DOUBLE_EQ(c(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 1.0);
}

TEST(EmpiricalComono, DiagonalMatchesRawVariances) {
  std::mt19937_64 engine(5);
  std::normal_distribution<double> normal;
  Matrix x(40, 4);
  for (Index k = 0; k < x.rows(); ++k) {
    for (Index j = 0; j < x.cols(); ++j) x(k, j) = std::exp(normal(engine)) * static_cast<double>(j + 1);
  }
  const Matrix raw = sample_cov(x);
  const Matrix c = empirical_comono_cov(x);
  EXPECT_LE((c.diagonal() - raw.diagonal()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(c.isApprox(c.transpose(), 0.0));
}

TEST(EmpiricalComono, TiesKeepInputOrder) {
  Matrix x(4, 2);
  x << 1, 4, 1, 3, 0, 2, 2, 1;
  const Matrix c = comonotonic_rearrangement(x);
  EXPECT_EQ(c.col(0), x.col(0));
  // Column 0 ranks rows as 2, 0, 1, 3; column 1 sorted ascending is 1, 2, 3, 4.
  EXPECT_EQ(c.col(1), (Vector(4) << 2, 3, 1, 4).finished());
}

TEST(EmpiricalComono, InsufficientSamples) {
  EXPECT_EQ(code_of([] { empirical_comono_cov(Matrix::Ones(1, 2)); }), ErrorCode::InsufficientSamples);
}

TEST(EmpiricalMoments, ComonotonicSamplesGiveUnitIndices) {
  Matrix x(30, 3);
  for (Index k = 0; k < 30; ++k) {
    const double u = std::sin(0.37 * static_cast<double>(k)) + 0.01 * static_cast<double>(k);
    x.row(k) << u, std::exp(u), 2.0 * u + 5.0;
  }
  const auto m = empirical_moments(x);
  const Weights w((Vector(3) << 1, 2, 0.5).finished());
  EXPECT_NEAR(hix(w, m).value, 1.0, 1e-14);
  EXPECT_NEAR(rhix(w, m).value, 1.0, 1e-14);
}

TEST(SampleCov, MatchesTextbookValues) {
  Matrix x(4, 2);
  x << 1, 2, 2, 4, 3, 6, 4, 9;
  const Matrix c = sample_cov(x);
  EXPECT_DOUBLE_EQ(c(0, 0), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(c(0, 1), 11.5 / 3.0);
}
