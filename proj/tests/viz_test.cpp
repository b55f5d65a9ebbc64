#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/viz.hpp"

using toxcls::Matrix;
using toxcls::SeededRng;

namespace {

// Eigenvalues of a symmetric 3x3 matrix via the trigonometric closed form of
// the characteristic polynomial, sorted descending. Fully independent of the
// power iteration under test.
std::vector<double> symmetric3_eigenvalues(const Matrix& m) {
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    std::vector<double> eig(3);
    if (p1 < 1e-30) {
        eig = {m(0, 0), m(1, 1), m(2, 2)};
    } else {
        const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
        const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                          (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        Matrix b(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
        const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                            b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                            b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        const double r = std::clamp(detb / 2.0, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        eig[0] = q + 2.0 * p * std::cos(phi);
        eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        eig[1] = 3.0 * q - eig[0] - eig[2];
    }
    std::sort(eig.rbegin(), eig.rend());
    return eig;
}

Matrix sample_covariance(const Matrix& x) {
    std::vector<double> mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
    for (double& m : mean) m /= static_cast<double>(x.rows());
    Matrix cov(x.cols(), x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t a = 0; a < x.cols(); ++a)
            for (std::size_t b = 0; b < x.cols(); ++b)
                cov(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
    for (double& v : cov.data()) v /= static_cast<double>(x.rows()) - 1.0;
    return cov;
}

double column_variance(const Matrix& m, std::size_t col) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, col);
    mean /= static_cast<double>(m.rows());
    double var = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double d = m(i, col) - mean;
        var += d * d;
    }
    return var / (static_cast<double>(m.rows()) - 1.0);
}

// Three well-separated point clouds in 4-D.
Matrix cluster_fixture(std::vector<int>& labels) {
    SeededRng rng(808);
    const std::size_t per = 10;
    Matrix x(3 * per, 4);
    labels.assign(3 * per, 0);
    const double centers[3][4] = {{0, 0, 0, 0}, {8, 8, 0, 0}, {0, 8, 8, 8}};
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < per; ++i) {
            const std::size_t row = c * per + i;
            labels[row] = static_cast<int>(c);
            for (std::size_t j = 0; j < 4; ++j)
                x(row, j) = centers[c][j] + 0.3 * rng.next_gaussian();
        }
    return x;
}

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("toxcls_viz_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

} // namespace

TEST_CASE("PCA on collinear points leaves no second-component variance") {
    // 12 points along the direction (3,4), plus an offset
    Matrix x(12, 2);
    for (std::size_t i = 0; i < 12; ++i) {
        const double t = -1.0 + static_cast<double>(i) / 5.5 * 1.0;
        x(i, 0) = 3.0 * t + 7.0;
        x(i, 1) = 4.0 * t - 2.0;
    }
    const auto proj = toxcls::pca_2d(x);
    REQUIRE(proj.params.at("eigenvalue_2") < 1e-10);
    REQUIRE(column_variance(proj.coordinates, 1) < 1e-10);
    // sign convention: the largest loading is positive, so the projection
    // grows with t
    REQUIRE(proj.coordinates(11, 0) > proj.coordinates(0, 0));
}

TEST_CASE("PCA eigenvalues match the closed-form cubic on a 3-D covariance") {
    SeededRng rng(515);
    Matrix x(40, 3);
    for (std::size_t i = 0; i < 40; ++i) {
        const double a = rng.next_gaussian(), b = rng.next_gaussian(), c = rng.next_gaussian();
        x(i, 0) = 2.0 * a + 0.3 * b;
        x(i, 1) = -1.0 * a + 0.8 * b + 0.1 * c;
        x(i, 2) = 0.5 * c + 0.2 * a;
    }
    const auto oracle = symmetric3_eigenvalues(sample_covariance(x));
    const auto proj = toxcls::pca_2d(x);
    REQUIRE(std::abs(proj.params.at("eigenvalue_1") - oracle[0]) <
            1e-8 * std::max(1.0, oracle[0]));
    REQUIRE(std::abs(proj.params.at("eigenvalue_2") - oracle[1]) <
            1e-8 * std::max(1.0, oracle[1]));
    // component variances follow the eigenvalues, largest first
    const double v1 = column_variance(proj.coordinates, 0);
    const double v2 = column_variance(proj.coordinates, 1);
    REQUIRE(v1 >= v2);
    REQUIRE(std::abs(v1 - oracle[0]) < 1e-8 * std::max(1.0, oracle[0]));
    REQUIRE(std::abs(v2 - oracle[1]) < 1e-8 * std::max(1.0, oracle[1]));
}

TEST_CASE("PCA is invariant to translating the whole cloud") {
    SeededRng rng(99);
    Matrix x(20, 3);
    for (double& v : x.data()) v = rng.next_gaussian();
    Matrix shifted = x;
    for (std::size_t i = 0; i < shifted.rows(); ++i) {
        shifted(i, 0) += 100.0;
        shifted(i, 1) -= 3.5;
        shifted(i, 2) += 0.25;
    }
    const auto a = toxcls::pca_2d(x);
    const auto b = toxcls::pca_2d(shifted);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < 2; ++k)
            REQUIRE(std::abs(a.coordinates(i, k) - b.coordinates(i, k)) < 1e-8);
}

TEST_CASE("PCA input validation") {
    Matrix two(2, 3, 1.0);
    REQUIRE_THROWS_AS(toxcls::pca_2d(two), toxcls::ArgumentError);
    Matrix narrow(5, 1, 1.0);
    REQUIRE_THROWS_AS(toxcls::pca_2d(narrow), toxcls::ArgumentError);
    Matrix ok(5, 2, 1.0);
    REQUIRE_THROWS_AS(toxcls::pca_2d(ok, {0, 1}), toxcls::ArgumentError);
}

TEST_CASE("t-SNE conditional rows hit the requested perplexity") {
    std::vector<int> labels;
    const Matrix x = cluster_fixture(labels);
    const std::size_t n = x.rows();
    const double target = 5.0;

    Matrix sqdist(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sqdist(i, j) = sqdist(j, i) =
                toxcls::squared_distance(x.row(i), x.row(j), x.cols());

    Matrix conditional(n, n, 0.0);
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        // independent bisection on the precision using a directly computed
        // Gaussian row, nothing shared with the library's calibration loop
        double lo = 1e-12, hi = 1e6;
        const auto perplexity_at = [&](double beta) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-beta * sqdist(i, j));
                sum += row[j];
            }
            double h = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] /= sum;
                if (row[j] > 0.0) h -= row[j] * std::log(row[j]);
            }
            return std::exp(h);
        };
        for (int step = 0; step < 200; ++step) {
            const double beta = 0.5 * (lo + hi);
            (perplexity_at(beta) > target ? lo : hi) = beta;
        }
        const double beta = 0.5 * (lo + hi);
        REQUIRE(std::abs(perplexity_at(beta) - target) < 1e-3);
        // the library's row computation agrees with the direct formula
        std::vector<double> lib_row(n, 0.0);
        const double lib_perp = toxcls::detail::conditional_row(sqdist, i, beta, lib_row);
        REQUIRE(std::abs(lib_perp - perplexity_at(beta)) < 1e-9);
        for (std::size_t j = 0; j < n; ++j) REQUIRE(std::abs(lib_row[j] - row[j]) < 1e-12);
        for (std::size_t j = 0; j < n; ++j) conditional(i, j) = row[j];
    }

    // symmetrized joint distribution: nonnegative, symmetric, sums to one
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double p =
                (conditional(i, j) + conditional(j, i)) / (2.0 * static_cast<double>(n));
            const double pt =
                (conditional(j, i) + conditional(i, j)) / (2.0 * static_cast<double>(n));
            REQUIRE(p >= 0.0);
            REQUIRE(p == pt);
            total += p;
        }
    REQUIRE(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("t-SNE keeps optimizing: late KL beats early KL on clusters") {
    std::vector<int> labels;
    const Matrix x = cluster_fixture(labels);
    SeededRng rng(4242);
    const auto result = toxcls::tsne_2d(x, labels, 5.0, 1000, rng);
    REQUIRE(result.kl_trace.size() == 1000);
    REQUIRE(result.kl_trace[999] < result.kl_trace[299]);
    REQUIRE(result.kl_trace[999] >= 0.0);
    REQUIRE(result.projection.coordinates.rows() == x.rows());
    REQUIRE(result.projection.params.at("final_kl") == result.kl_trace.back());
}

TEST_CASE("t-SNE with two points stays centered") {
    const Matrix x = Matrix::from_rows({{0.0, 0.0}, {1.0, 1.0}});
    SeededRng rng(5);
    const auto result = toxcls::tsne_2d(x, {}, 1.0, 50, rng);
    for (std::size_t k = 0; k < 2; ++k)
        REQUIRE(std::abs(result.projection.coordinates(0, k) +
                         result.projection.coordinates(1, k)) < 1e-12);
}

TEST_CASE("t-SNE lowers an impossible perplexity and says so") {
    SeededRng data_rng(3);
    Matrix x(10, 2);
    for (double& v : x.data()) v = data_rng.next_gaussian();
    SeededRng rng(6);
    const auto result = toxcls::tsne_2d(x, {}, 50.0, 5, rng);
    REQUIRE(result.warnings.size() == 1);
    REQUIRE(result.projection.params.at("perplexity") == 3.0); // floor(9 / 3)
}

TEST_CASE("t-SNE reports the point whose bandwidth cannot be calibrated") {
    // identical points: every conditional row has perplexity n-1 = 9
    // regardless of bandwidth, so a target of 2 is unreachable
    Matrix x(10, 2, 1.0);
    SeededRng rng(1);
    try {
        toxcls::tsne_2d(x, {}, 2.0, 5, rng);
        FAIL("expected ConvergenceError");
    } catch (const toxcls::ConvergenceError& e) {
        REQUIRE(std::string(e.what()).find("point 0") != std::string::npos);
        REQUIRE(e.residual() > 1e-3);
    }
}

TEST_CASE("t-SNE input validation") {
    const Matrix one = Matrix::from_rows({{0.0, 0.0}});
    SeededRng rng(1);
    REQUIRE_THROWS_AS(toxcls::tsne_2d(one, {}, 1.0, 5, rng), toxcls::ArgumentError);
    const Matrix ok = Matrix::from_rows({{0, 0}, {1, 1}, {2, 2}});
    REQUIRE_THROWS_AS(toxcls::tsne_2d(ok, {}, 0.0, 5, rng), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(toxcls::tsne_2d(ok, {}, 1.0, 0, rng), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(toxcls::tsne_2d(ok, {0, 1}, 1.0, 5, rng), toxcls::ArgumentError);
}

TEST_CASE("scatter export writes a parsable CSV and one circle per point") {
    std::vector<int> labels;
    const Matrix x = cluster_fixture(labels);
    const auto proj = toxcls::pca_2d(x, labels);
    const auto dir = temp_dir("scatter");
    const std::string prefix = (dir / "pca").string();
    toxcls::emit_scatter(proj, prefix);

    std::ifstream csv(prefix + ".csv");
    REQUIRE(csv.good());
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "x,y,label");
    std::size_t rows = 0;
    std::size_t label_sum = 0;
    while (std::getline(csv, line)) {
        ++rows;
        const auto last_comma = line.rfind(',');
        REQUIRE(last_comma != std::string::npos);
        label_sum += static_cast<std::size_t>(std::stoi(line.substr(last_comma + 1)));
    }
    REQUIRE(rows == x.rows());
    REQUIRE(label_sum == 30); // ten each of labels 0, 1, 2

    std::ifstream svg_in(prefix + ".svg");
    REQUIRE(svg_in.good());
    std::stringstream ss;
    ss << svg_in.rdbuf();
    const std::string svg = ss.str();
    REQUIRE(count_occurrences(svg, "<circle") == x.rows());
    REQUIRE(count_occurrences(svg, "<rect") >= 3); // one legend swatch per class
    REQUIRE(svg.find("</svg>") != std::string::npos);

    std::filesystem::remove_all(dir);
}
