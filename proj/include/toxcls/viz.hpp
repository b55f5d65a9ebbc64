#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/svg.hpp"

namespace toxcls {

struct Projection2D {
    Matrix coordinates{0, 2};
    std::vector<int> labels;
    std::string method;
    std::map<std::string, double> params;
};

inline constexpr std::uint64_t kPcaStartSeed = 0x504341; // fixed start-vector stream

namespace detail {

inline Matrix mean_centered(const Matrix& x) {
    Matrix c(x.rows(), x.cols());
    std::vector<double> mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) c(i, j) = x(i, j) - mean[j];
    return c;
}

/// Dominant eigenpair of a symmetric PSD matrix by power iteration, with the
/// iterate re-orthogonalized against previously found eigenvectors.
inline std::pair<double, std::vector<double>> power_iteration(
    const Matrix& a, const std::vector<std::vector<double>>& previous, SeededRng& rng) {
    const std::size_t p = a.rows();
    std::vector<double> v(p), av(p);

    const auto orthogonalize = [&](std::vector<double>& u) {
        for (const auto& prev : previous) {
            const double proj = dot(u.data(), prev.data(), p);
            for (std::size_t j = 0; j < p; ++j) u[j] -= proj * prev[j];
        }
    };
    const auto norm_of = [&](const std::vector<double>& u) {
        return std::sqrt(dot(u.data(), u.data(), p));
    };

    double norm = 0.0;
    do {
        for (std::size_t j = 0; j < p; ++j) v[j] = rng.next_gaussian();
        orthogonalize(v);
        norm = norm_of(v);
    } while (norm < 1e-12);
    for (double& x : v) x /= norm;

    double lambda = 0.0, residual = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        for (std::size_t i = 0; i < p; ++i) av[i] = dot(a.row(i), v.data(), p);
        // Project out the found eigenvectors before measuring convergence.
        // Deflation leaves rounding-level leakage along them (bounded by the
        // previous component's acceptance threshold), which would otherwise
        // put a floor on the residual above the tolerance for the smaller
        // eigenvalues.
        orthogonalize(av);
        lambda = dot(v.data(), av.data(), p);
        residual = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            residual = std::max(residual, std::abs(av[i] - lambda * v[i]));
        if (residual <= 1e-10 * std::max(1.0, std::abs(lambda))) {
            // Deflated matrix annihilated the remaining subspace: the current
            // direction is an eigenvector for eigenvalue ~0.
            if (lambda < 0.0) lambda = 0.0;
            return {lambda, v};
        }
        const double av_norm = norm_of(av);
        if (av_norm < 1e-300) return {0.0, v};
        for (std::size_t j = 0; j < p; ++j) v[j] = av[j] / av_norm;
    }
    throw ConvergenceError("pca: power iteration did not converge", residual);
}

inline void fix_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
}

} // namespace detail

/// Projection onto the top two principal components of the sample covariance
/// (divisor N-1). Eigenvectors come from power iteration with deflation from
/// a fixed internal starting stream, and each component's sign is chosen so
/// its largest-magnitude loading is positive.
inline Projection2D pca_2d(const Matrix& x, const std::vector<int>& labels = {}) {
    if (x.rows() < 3) throw ArgumentError("pca: need at least 3 rows");
    if (x.cols() < 2) throw ArgumentError("pca: need at least 2 features");
    if (!labels.empty() && labels.size() != x.rows())
        throw ArgumentError("pca: label count does not match rows");

    const Matrix centered = detail::mean_centered(x);
    const std::size_t p = x.cols();
    Matrix cov(p, p, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* row = centered.row(i);
        for (std::size_t a = 0; a < p; ++a) {
            if (row[a] == 0.0) continue;
            for (std::size_t b = a; b < p; ++b) cov(a, b) += row[a] * row[b];
        }
    }
    const double denom = static_cast<double>(x.rows()) - 1.0;
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            cov(a, b) /= denom;
            cov(b, a) = cov(a, b);
        }

    SeededRng rng(kPcaStartSeed);
    std::vector<std::vector<double>> components;
    std::vector<double> eigenvalues;
    Matrix deflated = cov;
    for (int k = 0; k < 2; ++k) {
        auto [lambda, v] = detail::power_iteration(deflated, components, rng);
        detail::fix_sign(v);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) deflated(a, b) -= lambda * v[a] * v[b];
        components.push_back(std::move(v));
        eigenvalues.push_back(lambda);
    }

    Projection2D proj;
    proj.method = "pca";
    proj.labels = labels;
    proj.coordinates = Matrix(x.rows(), 2);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (int k = 0; k < 2; ++k)
            proj.coordinates(i, static_cast<std::size_t>(k)) =
                dot(centered.row(i), components[static_cast<std::size_t>(k)].data(), p);
    proj.params["eigenvalue_1"] = eigenvalues[0];
    proj.params["eigenvalue_2"] = eigenvalues[1];
    return proj;
}

struct TsneResult {
    Projection2D projection;
    std::vector<double> kl_trace;
    std::vector<std::string> warnings;
};

namespace detail {

/// Conditional distribution row for point i given precision beta, plus its
/// perplexity exp(H).
inline double conditional_row(const Matrix& sqdist, std::size_t i, double beta,
                              std::vector<double>& row) {
    const std::size_t n = sqdist.rows();
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * sqdist(i, j));
        sum += row[j];
    }
    if (sum <= 0.0) return 0.0;
    double entropy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] /= sum;
        if (row[j] > 0.0) entropy -= row[j] * std::log(row[j]);
    }
    return std::exp(entropy);
}

} // namespace detail

/// Exact t-SNE with the reference algorithm's schedule: per-point bandwidth
/// calibration by 50-step binary search, symmetrized P, early exaggeration
/// x12 for the first 250 iterations (applied to the gradient; the KL trace
/// always uses the true P), learning rate 200, momentum 0.5 then 0.8 from
/// iteration 250, layout re-centered every iteration.
inline TsneResult tsne_2d(const Matrix& x, const std::vector<int>& labels, double perplexity,
                          int iterations, SeededRng& rng) {
    const std::size_t n = x.rows();
    if (n < 2) throw ArgumentError("tsne: need at least 2 rows");
    if (!labels.empty() && labels.size() != n)
        throw ArgumentError("tsne: label count does not match rows");
    if (!(perplexity > 0.0)) throw ArgumentError("tsne: perplexity must be positive");
    if (iterations < 1) throw ArgumentError("tsne: iteration count must be positive");

    TsneResult result;
    double target = perplexity;
    const double max_target = std::max(1.0, std::floor(static_cast<double>(n - 1) / 3.0));
    if (target > max_target) {
        result.warnings.push_back("perplexity " + std::to_string(perplexity) +
                                  " too large for " + std::to_string(n) +
                                  " points; lowered to " + std::to_string(max_target));
        target = max_target;
    }

    Matrix sqdist(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sqdist(i, j) = sqdist(j, i) = squared_distance(x.row(i), x.row(j), x.cols());

    // Per-point precision calibration.
    Matrix conditional(n, n, 0.0);
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, beta_lo = 0.0, beta_hi = 0.0;
        bool has_lo = false, has_hi = false;
        double perp = detail::conditional_row(sqdist, i, beta, row);
        int step = 0;
        for (; step < 50 && std::abs(perp - target) > 1e-3; ++step) {
            if (perp > target) {
                beta_lo = beta;
                has_lo = true;
                beta = has_hi ? 0.5 * (beta + beta_hi) : beta * 2.0;
            } else {
                beta_hi = beta;
                has_hi = true;
                beta = has_lo ? 0.5 * (beta + beta_lo) : beta * 0.5;
            }
            perp = detail::conditional_row(sqdist, i, beta, row);
        }
        if (std::abs(perp - target) > 1e-3)
            throw ConvergenceError("tsne: perplexity calibration failed for point " +
                                       std::to_string(i),
                                   std::abs(perp - target));
        for (std::size_t j = 0; j < n; ++j) conditional(i, j) = row[j];
    }

    // Symmetrized joint distribution; sums to 1 by construction.
    Matrix p(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p(i, j) = (conditional(i, j) + conditional(j, i)) / (2.0 * static_cast<double>(n));

    Matrix y(n, 2);
    for (double& v : y.data()) v = rng.next_gaussian() * 1e-4;
    Matrix velocity(n, 2, 0.0);
    Matrix grad(n, 2, 0.0);
    Matrix num(n, n, 0.0);

    for (int iter = 1; iter <= iterations; ++iter) {
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j), 2));
                num(i, j) = num(j, i) = q;
                z += 2.0 * q;
            }

        const double exaggeration = iter <= 250 ? 12.0 : 1.0;
        grad.fill(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double* gi = grad.row(i);
            const double* yi = y.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double q = std::max(num(i, j) / z, 1e-12);
                const double mult = 4.0 * (exaggeration * p(i, j) - q) * num(i, j);
                const double* yj = y.row(j);
                gi[0] += mult * (yi[0] - yj[0]);
                gi[1] += mult * (yi[1] - yj[1]);
            }
        }

        const double momentum = iter < 250 ? 0.5 : 0.8;
        double mean0 = 0.0, mean1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            velocity(i, 0) = momentum * velocity(i, 0) - 200.0 * grad(i, 0);
            velocity(i, 1) = momentum * velocity(i, 1) - 200.0 * grad(i, 1);
            y(i, 0) += velocity(i, 0);
            y(i, 1) += velocity(i, 1);
            mean0 += y(i, 0);
            mean1 += y(i, 1);
        }
        mean0 /= static_cast<double>(n);
        mean1 /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) -= mean0;
            y(i, 1) -= mean1;
        }

        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || p(i, j) <= 0.0) continue;
                const double q = std::max(num(i, j) / z, 1e-12);
                kl += p(i, j) * std::log(p(i, j) / q);
            }
        result.kl_trace.push_back(kl);
    }

    result.projection.method = "tsne";
    result.projection.labels = labels;
    result.projection.coordinates = std::move(y);
    result.projection.params["perplexity"] = target;
    result.projection.params["iterations"] = static_cast<double>(iterations);
    result.projection.params["final_kl"] = result.kl_trace.back();
    return result;
}

/// Writes <prefix>.csv (x,y,label) and <prefix>.svg (scatter, one circle per
/// point, colors by class, legend drawn with swatch rectangles).
inline void emit_scatter(const Projection2D& proj, const std::string& path_prefix) {
    const std::string csv_path = path_prefix + ".csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot write " + csv_path);
    csv << "x,y,label\n";
    char buf[80];
    for (std::size_t i = 0; i < proj.coordinates.rows(); ++i) {
        const int label = proj.labels.empty() ? 0 : proj.labels[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", proj.coordinates(i, 0),
                      proj.coordinates(i, 1), label);
        csv << buf;
    }
    csv.flush();
    if (!csv) throw IoError("failed while writing " + csv_path);

    double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
    if (proj.coordinates.rows() > 0) {
        lo_x = hi_x = proj.coordinates(0, 0);
        lo_y = hi_y = proj.coordinates(0, 1);
        for (std::size_t i = 1; i < proj.coordinates.rows(); ++i) {
            lo_x = std::min(lo_x, proj.coordinates(i, 0));
            hi_x = std::max(hi_x, proj.coordinates(i, 0));
            lo_y = std::min(lo_y, proj.coordinates(i, 1));
            hi_y = std::max(hi_y, proj.coordinates(i, 1));
        }
    }
    if (hi_x - lo_x < 1e-12) hi_x = lo_x + 1.0;
    if (hi_y - lo_y < 1e-12) hi_y = lo_y + 1.0;

    const double width = 640.0, height = 480.0, pad = 50.0;
    SvgBuilder svg(width, height);
    svg.text(width / 2.0, 24.0, proj.method + " projection", 15, "middle");
    const auto sx = [&](double v) { return pad + (v - lo_x) / (hi_x - lo_x) * (width - 2.0 * pad); };
    const auto sy = [&](double v) {
        return height - pad - (v - lo_y) / (hi_y - lo_y) * (height - 2.0 * pad);
    };

    std::vector<int> classes;
    for (std::size_t i = 0; i < proj.coordinates.rows(); ++i) {
        const int label = proj.labels.empty() ? 0 : proj.labels[i];
        if (std::find(classes.begin(), classes.end(), label) == classes.end())
            classes.push_back(label);
    }
    std::sort(classes.begin(), classes.end());
    const auto color_of = [&](int label) {
        const auto it = std::find(classes.begin(), classes.end(), label);
        return svg_palette()[static_cast<std::size_t>(it - classes.begin()) %
                             svg_palette().size()];
    };

    for (std::size_t i = 0; i < proj.coordinates.rows(); ++i) {
        const int label = proj.labels.empty() ? 0 : proj.labels[i];
        svg.circle(sx(proj.coordinates(i, 0)), sy(proj.coordinates(i, 1)), 3.0, color_of(label));
    }
    // Legend uses rectangles so the circle count equals the point count.
    double ly = 40.0;
    for (const int label : classes) {
        svg.rect(width - 120.0, ly, 12.0, 12.0, color_of(label));
        svg.text(width - 102.0, ly + 10.0, "class " + std::to_string(label), 12);
        ly += 18.0;
    }

    const std::string svg_path = path_prefix + ".svg";
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + svg_path);
    out << svg.str();
    out.flush();
    if (!out) throw IoError("failed while writing " + svg_path);
}

} // namespace toxcls
