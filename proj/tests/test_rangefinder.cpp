#include <doctest.h>

#include "sketchbound/rangefinder.hpp"
#include "sketchbound/rng.hpp"
#include "sketchbound/worstcase.hpp"

#include <cmath>
#include <limits>

using namespace sketchbound;

namespace {

double norm2(const Matrix& a) { return singular_values(a).largest(); }

Matrix random_matrix_with_spectrum(Index m, Index n, const std::vector<double>& s, RngStream& rng) {
  const Matrix u = random_orthogonal(m, rng);
  const Matrix v = random_orthogonal(n, rng);
  Matrix d = Matrix::Zero(m, n);
  for (std::size_t i = 0; i < s.size(); ++i) d(static_cast<Index>(i), static_cast<Index>(i)) = s[i];
  return u * d * v.transpose();
}

Matrix dense_diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

}  // namespace

TEST_CASE("range_finder examples") {
  const FactorizationResult a = range_finder(dense_diag({5, 4, 0, 0}), {2, 0, 0, 1});
  CHECK(a.residual_spectral <= 1e-9);
  CHECK(a.b_is_q);

  const FactorizationResult z = range_finder(Matrix::Zero(6, 5), {2, 1, 0, 1});
  CHECK(z.residual_spectral == 0.0);
  CHECK(z.reduced_basis);
  CHECK(z.basis_width == 0);

  SUBCASE("identity: residual is W's floor") {
    const SketchConfig cfg{4, 4, 0, 99};
    const Matrix eye = Matrix::Identity(64, 64);
    const FactorizationResult r = range_finder(eye, cfg);
    const WorstCaseDecomposition d = decompose_test_matrix(draw_test_matrix(64, cfg), 4);
    const double w = worst_case_error_from_parts(d.x1, d.x2, d.sigma);
    CHECK(r.residual_spectral >= 1.0 - 1e-9);
    CHECK(r.residual_spectral <= w);
    // The same G on M(t) with large t reproduces the W draw.
    const FactorizationResult big = range_finder(worst_case_matrix(64, 4, 1e8), cfg);
    CHECK(std::abs(big.residual_spectral - w) <= 1e-6 * w);
  }
}

TEST_CASE("range_finder invariants") {
  RngStream rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 5 + static_cast<Index>(rng.uniform() * 30);
    const Index n = 5 + static_cast<Index>(rng.uniform() * 30);
    const Dim k = 1 + static_cast<Dim>(rng.uniform() * 3);
    const Dim p = static_cast<Dim>(rng.uniform() * 3);
    const Matrix a = gaussian_matrix(m, n, rng);
    const SketchConfig cfg{k, p, 0, static_cast<std::uint64_t>(trial)};
    const FactorizationResult r = range_finder(a, cfg);
    const double na = norm2(a);
    CHECK((r.q.transpose() * r.q - Matrix::Identity(r.q.cols(), r.q.cols())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((r.c - r.q.transpose() * a).cwiseAbs().maxCoeff() <= 1e-12 * na);
    const Spectrum s = singular_values(a);
    CHECK(r.residual_spectral >= s[static_cast<std::size_t>(k + p)] - 1e-8 * na);
    CHECK(r.residual_spectral <= na * (1 + 1e-12));
    CHECK(std::abs(r.residual_spectral - norm2(a - r.q * r.c)) <= 1e-8 * na);
    CHECK(*r.sigma_kplus1 == s[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("range_finder errors") {
  CHECK_THROWS_AS(range_finder(Matrix::Identity(4, 4), {3, 2, 0, 0}), SketchError);
  CHECK_THROWS_AS(range_finder(Matrix::Identity(4, 4), {0, 2, 0, 0}), SketchError);
  CHECK_THROWS_AS(range_finder(Matrix::Identity(4, 4), {1, -1, 0, 0}), SketchError);
  CHECK_THROWS_AS(range_finder_with(LinearOperator::dense(Matrix::Identity(4, 4)), Matrix::Ones(3, 2),
                                    {1, 1, 0, 0}),
                  SketchError);
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(range_finder(bad, {1, 0, 0, 0}), SketchError);
}

TEST_CASE("randomized_svd") {
  RngStream rng(2);
  const Matrix a = random_matrix_with_spectrum(12, 9, {3, 2, 1}, rng);
  const FactorizationResult r = randomized_svd(a, {3, 1, 0, 5});
  REQUIRE(r.svd);
  const Matrix usv = r.svd->u * r.svd->s.as_diagonal() * r.svd->v.transpose();
  CHECK(norm2(a - usv) <= 1e-8 * 3.0);

  const FactorizationResult d = randomized_svd(dense_diag({2, 1}), {1, 1, 0, 6});
  CHECK(d.svd->s[0] <= 2.0 + 1e-9);
}

TEST_CASE("property: Algorithm 2 identity on 100 instances") {
  RngStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 2 + static_cast<Index>(rng.uniform() * 39);
    const Index n = 2 + static_cast<Index>(rng.uniform() * 39);
    const Dim l = 1 + static_cast<Dim>(rng.uniform() * static_cast<double>(std::min(m, n) - 1));
    const Dim k = 1 + static_cast<Dim>(rng.uniform() * static_cast<double>(l));
    const Matrix a = gaussian_matrix(m, n, rng);
    const FactorizationResult r = randomized_svd(a, {std::min(k, l), l - std::min(k, l), 0,
                                                     static_cast<std::uint64_t>(trial)});
    const double na = norm2(a);
    const double e_svd = norm2(a - r.svd->u * r.svd->s.as_diagonal() * r.svd->v.transpose());
    const double e_qc = norm2(a - r.q * r.c);
    const double e_proj = norm2(a - r.q * (r.q.transpose() * a));
    CHECK(std::abs(e_svd - e_qc) <= 1e-8 * na);
    CHECK(std::abs(e_qc - e_proj) <= 1e-8 * na);
    CHECK(std::abs(e_svd - r.residual_spectral) <= 1e-8 * na);
  }
}

TEST_CASE("power_range_finder") {
  RngStream rng(4);
  SUBCASE("exact low rank") {
    const Matrix a = random_matrix_with_spectrum(20, 15, {4, 3, 1}, rng);
    for (Dim q : {1, 2, 4}) CHECK(power_range_finder(a, {3, 1, q, 8}).residual_spectral <= 1e-9 * 4.0);
  }
  SUBCASE("improves on the plain sketch") {
    const Matrix a = dense_diag({1, 0.5, 0, 0, 0});
    const double plain = range_finder(a, {1, 1, 0, 17}).residual_spectral;
    CHECK(power_range_finder(a, {1, 1, 2, 17}).residual_spectral <= plain + 1e-12);
  }
  SUBCASE("q = 0 rejected") {
    CHECK_THROWS_AS(power_range_finder(Matrix::Identity(3, 3), {1, 0, 0, 0}), SketchError);
  }
  SUBCASE("products counted") {
    const FactorizationResult r = power_range_finder(Matrix::Identity(6, 6), {2, 1, 3, 1});
    CHECK(r.products == 7);
    CHECK_FALSE(r.notes.empty());
  }
  SUBCASE("large t stays stable") {
    const FactorizationResult r = power_range_finder(worst_case_matrix(300, 5, 1e7), {5, 5, 3, 2});
    CHECK(std::isfinite(r.residual_spectral));
    CHECK(r.residual_spectral >= 1.0 - 1e-9);
    CHECK(r.basis_width == 10);
  }
}

TEST_CASE("property: power inequality for q = 1..3") {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 3 + static_cast<Index>(rng.uniform() * 20);
    const Index n = 3 + static_cast<Index>(rng.uniform() * 20);
    const Dim k = 1 + static_cast<Dim>(rng.uniform() * 2);
    const Dim p = static_cast<Dim>(rng.uniform() * 2);
    if (k + p > std::min(m, n)) continue;
    const Matrix a = gaussian_matrix(m, n, rng) / std::sqrt(static_cast<double>(std::max(m, n)));
    for (Dim q = 1; q <= 3; ++q) {
      const FactorizationResult r = power_range_finder(a, {k, p, q, static_cast<std::uint64_t>(trial)});
      Matrix powered = a;
      for (Dim i = 0; i < q; ++i) powered = a * (a.transpose() * powered);
      const double rhs = std::pow(norm2(powered - r.q * (r.q.transpose() * powered)),
                                  1.0 / static_cast<double>(2 * q + 1));
      CHECK(r.residual_spectral <= rhs + 1e-6);
    }
  }
}

TEST_CASE("determinism") {
  RngStream rng(6);
  const Matrix a = gaussian_matrix(30, 25, rng);
  const SketchConfig cfg{3, 2, 1, 1234};
  CHECK(draw_test_matrix(25, cfg) == draw_test_matrix(25, cfg));
  const FactorizationResult r1 = range_finder(a, cfg);
  const FactorizationResult r2 = range_finder(a, cfg);
  CHECK(r1.residual_spectral == r2.residual_spectral);
  CHECK(r1.q == r2.q);
}

TEST_CASE("diagonal input never needs a dense matrix") {
  const Spectrum s = worst_case_matrix(20000, 3, 1e4);
  const FactorizationResult r = range_finder(s, {3, 3, 0, 9});
  CHECK(r.q.rows() == 20000);
  CHECK(*r.sigma_kplus1 == 1.0);
  CHECK(r.residual_spectral >= 1.0);
}

TEST_CASE("residual_report") {
  SUBCASE("exact rank k") {
    const Matrix a = dense_diag({3, 2, 0, 0});
    const SketchConfig cfg{2, 0, 0, 1};
    const ResidualReport rep = residual_report(a, range_finder(a, cfg), cfg, {false});
    CHECK(*rep.ratio == 1.0);
    CHECK_FALSE(rep.ratio_note.empty());
    CHECK(rep.residual_spectral <= 1e-9);
  }
  SUBCASE("diag(2,1,1)") {
    const Matrix a = dense_diag({2, 1, 1});
    const SketchConfig cfg{1, 1, 0, 3};
    const ResidualReport rep = residual_report(a, range_finder(a, cfg), cfg);
    CHECK(*rep.sigma_kplus1 == doctest::Approx(1.0));
    CHECK(*rep.frob_tail == doctest::Approx(std::sqrt(2.0)));
    CHECK(rep.bounds);
  }
  SUBCASE("sigma zero but residual positive") {
    FactorizationResult fake;
    fake.residual_spectral = 0.5;
    fake.sigma_kplus1 = 0.0;
    fake.input_spectrum = Spectrum({1.0, 0.0});
    const ResidualReport rep = residual_report(2, 2, fake, {1, 0, 0, 0}, {false});
    CHECK(std::isinf(*rep.ratio));
    CHECK(to_json(rep)["ratio"] == "inf");
  }
  SUBCASE("worst-case run: ratio is the W draw") {
    const SketchConfig cfg{3, 3, 0, 21};
    const Spectrum m_t = worst_case_matrix(40, 3, 1e8);
    const FactorizationResult r = range_finder(m_t, cfg);
    const ResidualReport rep = residual_report(40, 40, r, cfg, {false});
    const WorstCaseDecomposition d = decompose_test_matrix(draw_test_matrix(40, cfg), 3);
    CHECK(*rep.ratio == doctest::Approx(worst_case_error_from_parts(d.x1, d.x2, d.sigma)).epsilon(1e-6));
  }
  SUBCASE("json fields") {
    const Matrix a = dense_diag({2, 1, 1, 0.5});
    const SketchConfig cfg{1, 2, 0, 4};
    const auto j = to_json(residual_report(a, range_finder(a, cfg), cfg, {true, 200}));
    for (const char* key : {"residual_spectral", "sigma_k_plus_1", "ratio", "frob_tail", "bounds", "config", "seed"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["config"]["k"] == 1);
    CHECK(j["bounds"]["e_sigma_inv_source"] == "monte_carlo");
    CHECK(j["seed"] == 4);
  }
}
