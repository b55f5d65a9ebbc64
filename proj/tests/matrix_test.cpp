#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/numerics.hpp"

using toxcls::Matrix;

TEST_CASE("matrix construction, indexing, and bounds checks") {
    Matrix m(2, 3, 1.5);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    REQUIRE(m(1, 2) == 1.5);
    m.at(0, 1) = -2.0;
    REQUIRE(m.at(0, 1) == -2.0);
    REQUIRE_THROWS_AS(m.at(2, 0), toxcls::DimensionError);
    REQUIRE_THROWS_AS(m.at(0, 3), toxcls::DimensionError);

    const Matrix f = Matrix::from_rows({{1, 2}, {3, 4}});
    REQUIRE(f(0, 0) == 1);
    REQUIRE(f(1, 1) == 4);
    REQUIRE_THROWS_AS(Matrix::from_rows({{1.0, std::nan("")}}), toxcls::NumericError);
    const double inf = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(Matrix::from_data(1, 2, {1.0, inf}), toxcls::NumericError);
    REQUIRE_THROWS_AS(Matrix::from_data(2, 2, {1.0, 2.0, 3.0}), toxcls::DimensionError);
}

TEST_CASE("matmul matches a hand-computed product") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix b = Matrix::from_rows({{7, 8}, {9, 10}, {11, 12}});
    const Matrix c = toxcls::matmul(a, b);
    REQUIRE(c.rows() == 2);
    REQUIRE(c.cols() == 2);
    REQUIRE(c(0, 0) == 58);
    REQUIRE(c(0, 1) == 64);
    REQUIRE(c(1, 0) == 139);
    REQUIRE(c(1, 1) == 154);
    REQUIRE_THROWS_AS(toxcls::matmul(a, a), toxcls::DimensionError);
}

TEST_CASE("transpose flips indices") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix t = toxcls::transpose(a);
    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 2);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) REQUIRE(t(j, i) == a(i, j));
}

TEST_CASE("axpy updates matrices and vectors in place") {
    Matrix y = Matrix::from_rows({{1, 1}, {1, 1}});
    const Matrix x = Matrix::from_rows({{2, 4}, {6, 8}});
    toxcls::axpy(0.5, x, y);
    REQUIRE(y(0, 0) == 2.0);
    REQUIRE(y(0, 1) == 3.0);
    REQUIRE(y(1, 0) == 4.0);
    REQUIRE(y(1, 1) == 5.0);
    Matrix wrong(1, 2);
    REQUIRE_THROWS_AS(toxcls::axpy(1.0, x, wrong), toxcls::DimensionError);

    std::vector<double> vy{1.0, 2.0};
    const std::vector<double> vx{10.0, 20.0};
    toxcls::axpy(-0.1, vx, vy);
    REQUIRE(vy[0] == Catch::Approx(0.0));
    REQUIRE(vy[1] == Catch::Approx(0.0));
    std::vector<double> short_y{1.0};
    REQUIRE_THROWS_AS(toxcls::axpy(1.0, vx, short_y), toxcls::DimensionError);
}

TEST_CASE("dot and squared_distance agree with direct sums") {
    const std::vector<double> a{1.0, -2.0, 3.0};
    const std::vector<double> b{4.0, 5.0, -6.0};
    REQUIRE(toxcls::dot(a.data(), b.data(), 3) == Catch::Approx(4.0 - 10.0 - 18.0));
    REQUIRE(toxcls::squared_distance(a.data(), b.data(), 3) ==
            Catch::Approx(9.0 + 49.0 + 81.0));
}

TEST_CASE("cholesky factors a known SPD matrix and rejects indefinite ones") {
    // A = L L^T with L = [[2,0,0],[6,1,0],[-8,5,3]]
    const Matrix a = Matrix::from_rows({{4, 12, -16}, {12, 37, -43}, {-16, -43, 98}});
    Matrix l;
    REQUIRE(toxcls::cholesky_factor(a, l));
    REQUIRE(l(0, 0) == Catch::Approx(2.0));
    REQUIRE(l(1, 0) == Catch::Approx(6.0));
    REQUIRE(l(1, 1) == Catch::Approx(1.0));
    REQUIRE(l(2, 0) == Catch::Approx(-8.0));
    REQUIRE(l(2, 1) == Catch::Approx(5.0));
    REQUIRE(l(2, 2) == Catch::Approx(3.0));
    REQUIRE(l(0, 1) == 0.0);

    const Matrix indefinite = Matrix::from_rows({{1, 2}, {2, 1}});
    REQUIRE_FALSE(toxcls::cholesky_factor(indefinite, l));
}

TEST_CASE("spd_inverse produces an actual inverse") {
    const Matrix a = Matrix::from_rows({{4, 12, -16}, {12, 37, -43}, {-16, -43, 98}});
    const Matrix inv = toxcls::spd_inverse(a);
    const Matrix prod = toxcls::matmul(a, inv);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            REQUIRE(prod(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-9));

    const Matrix indefinite = Matrix::from_rows({{1, 2}, {2, 1}});
    REQUIRE_THROWS_AS(toxcls::spd_inverse(indefinite), toxcls::NumericError);
}

TEST_CASE("softmax normalizes and is shift invariant") {
    const auto p = toxcls::softmax({1.0, 2.0, 3.0});
    REQUIRE(p.size() == 3);
    double sum = 0.0;
    for (const double v : p) sum += v;
    REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-12));
    // e / (1 + e + e^2) pattern
    const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    REQUIRE(p[0] == Catch::Approx(std::exp(1.0) / z).epsilon(1e-12));
    REQUIRE(p[2] == Catch::Approx(std::exp(3.0) / z).epsilon(1e-12));

    const auto shifted = toxcls::softmax({1001.0, 1002.0, 1003.0});
    for (std::size_t i = 0; i < 3; ++i)
        REQUIRE(shifted[i] == Catch::Approx(p[i]).epsilon(1e-12));

    REQUIRE_THROWS_AS(toxcls::softmax({1.0, std::nan("")}), toxcls::NumericError);
    REQUIRE_THROWS_AS(toxcls::softmax({}), toxcls::ArgumentError);
}

TEST_CASE("finite difference gradient matches an analytic quadratic") {
    // f(x) = x0^2 + 3 x0 x1, grad = (2 x0 + 3 x1, 3 x0)
    const auto f = [](const std::vector<double>& x) { return x[0] * x[0] + 3.0 * x[0] * x[1]; };
    const auto g = toxcls::finite_diff_gradient(f, {2.0, -1.0}, 1e-6);
    REQUIRE(g.size() == 2);
    REQUIRE(g[0] == Catch::Approx(1.0).epsilon(1e-6));
    REQUIRE(g[1] == Catch::Approx(6.0).epsilon(1e-6));
}
