#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"

namespace toxcls {

/// Linear discriminant analysis for binary labels. Pooled within-class
/// covariance (divisor N - 2) with a scaled ridge: lambda * trace(S)/p is
/// added to the diagonal, starting at lambda = 1e-6 and escalating tenfold
/// up to 1e-2 until the Cholesky factorization succeeds. Discriminants
/// include log-prior terms so unbalanced folds are handled correctly.
class LinearDiscriminant {
  public:
    void fit(const Matrix& x, const std::vector<int>& y) {
        if (x.rows() != y.size()) throw DimensionError("lda: rows and labels differ");
        const std::size_t p = x.cols();
        if (p == 0) throw ArgumentError("lda: need at least one feature");
        std::size_t counts[2] = {0, 0};
        for (int label : y) {
            if (label != 0 && label != 1) throw ArgumentError("lda: labels must be 0 or 1");
            ++counts[label];
        }
        if (counts[0] == 0 || counts[1] == 0)
            throw ArgumentError("lda: training set contains a single class");
        if (counts[0] < 2 || counts[1] < 2)
            throw ArgumentError("lda: each class needs at least 2 samples");

        for (int c = 0; c < 2; ++c) {
            mean_[c].assign(p, 0.0);
            log_prior_[c] = std::log(static_cast<double>(counts[c]) /
                                     static_cast<double>(x.rows()));
        }
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < p; ++j) mean_[y[i]][j] += xi[j];
        }
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < p; ++j) mean_[c][j] /= static_cast<double>(counts[c]);

        Matrix pooled(p, p, 0.0);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double* xi = x.row(i);
            const auto& mu = mean_[y[i]];
            for (std::size_t a = 0; a < p; ++a) {
                const double da = xi[a] - mu[a];
                if (da == 0.0) continue;
                for (std::size_t b = 0; b < p; ++b) pooled(a, b) += da * (xi[b] - mu[b]);
            }
        }
        const double denom = static_cast<double>(x.rows()) - 2.0;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) pooled(a, b) /= denom;

        double trace = 0.0;
        for (std::size_t a = 0; a < p; ++a) trace += pooled(a, a);
        double scale = trace / static_cast<double>(p);
        if (scale <= 0.0) scale = 1.0;

        Matrix chol(p, p, 0.0);
        ridge_ = 0.0;
        bool ok = cholesky_factor(pooled, chol);
        for (double lambda = 1e-6; !ok && lambda < 1.05e-2; lambda *= 10.0) {
            Matrix regularized = pooled;
            for (std::size_t a = 0; a < p; ++a) regularized(a, a) += lambda * scale;
            ok = cholesky_factor(regularized, chol);
            if (ok) {
                pooled = std::move(regularized);
                ridge_ = lambda * scale;
            }
        }
        if (!ok)
            throw NumericError(
                "lda: pooled covariance is not positive definite even with ridge " +
                std::to_string(1e-2 * scale));

        precision_ = spd_inverse(pooled);
        weights_.assign(p, 0.0);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                weights_[a] += precision_(a, b) * (mean_[1][b] - mean_[0][b]);

        // score(x) = delta_1(x) - delta_0(x) = w.x - 1/2 (mu1+mu0).w + ln(pi1/pi0)
        double midpoint = 0.0;
        for (std::size_t a = 0; a < p; ++a)
            midpoint += 0.5 * (mean_[1][a] + mean_[0][a]) * weights_[a];
        threshold_ = midpoint - (log_prior_[1] - log_prior_[0]);
        n_features_ = p;
        fitted_ = true;
    }

    /// delta_c(x) = x' S^-1 mu_c - 1/2 mu_c' S^-1 mu_c + ln prior_c
    double discriminant(int c, const double* x) const {
        require_fitted();
        if (c != 0 && c != 1) throw ArgumentError("lda: class index must be 0 or 1");
        const auto& mu = mean_[c];
        double xs = 0.0, ms = 0.0;
        for (std::size_t a = 0; a < n_features_; ++a) {
            double sm = 0.0;
            for (std::size_t b = 0; b < n_features_; ++b) sm += precision_(a, b) * mu[b];
            xs += x[a] * sm;
            ms += mu[a] * sm;
        }
        return xs - 0.5 * ms + log_prior_[c];
    }

    double score(const double* x) const {
        require_fitted();
        return dot(x, weights_.data(), n_features_) - threshold_;
    }

    int predict(const double* x) const { return score(x) > 0.0 ? 1 : 0; }

    std::vector<int> predict(const Matrix& x) const {
        require_fitted();
        if (x.cols() != n_features_) throw DimensionError("lda: feature count mismatch");
        std::vector<int> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
        return out;
    }

    const std::vector<double>& mean(int c) const {
        if (c != 0 && c != 1) throw ArgumentError("lda: class index must be 0 or 1");
        return mean_[c];
    }
    const std::vector<double>& weights() const {
        require_fitted();
        return weights_;
    }
    const Matrix& precision() const {
        require_fitted();
        return precision_;
    }
    double threshold() const { return threshold_; }
    double log_prior(int c) const {
        if (c != 0 && c != 1) throw ArgumentError("lda: class index must be 0 or 1");
        return log_prior_[c];
    }
    /// Ridge actually added to the covariance diagonal (0 when none was needed).
    double ridge() const { return ridge_; }

    /// Rebuilds a fitted model from stored class means, precision matrix and
    /// log priors; the weight vector and threshold are recomputed from them.
    static LinearDiscriminant from_parameters(const std::vector<double>& mean0,
                                              const std::vector<double>& mean1, Matrix precision,
                                              double log_prior0, double log_prior1,
                                              double ridge = 0.0) {
        const std::size_t p = mean0.size();
        if (p == 0 || mean1.size() != p || precision.rows() != p || precision.cols() != p)
            throw DimensionError("lda: parameter shapes disagree");
        LinearDiscriminant lda;
        lda.mean_[0] = mean0;
        lda.mean_[1] = mean1;
        lda.log_prior_[0] = log_prior0;
        lda.log_prior_[1] = log_prior1;
        lda.precision_ = std::move(precision);
        lda.ridge_ = ridge;
        lda.weights_.assign(p, 0.0);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                lda.weights_[a] += lda.precision_(a, b) * (mean1[b] - mean0[b]);
        double midpoint = 0.0;
        for (std::size_t a = 0; a < p; ++a)
            midpoint += 0.5 * (mean1[a] + mean0[a]) * lda.weights_[a];
        lda.threshold_ = midpoint - (log_prior1 - log_prior0);
        lda.n_features_ = p;
        lda.fitted_ = true;
        return lda;
    }

  private:
    void require_fitted() const {
        if (!fitted_) throw ArgumentError("lda: fit() has not been called");
    }

    std::vector<double> mean_[2];
    double log_prior_[2] = {0.0, 0.0};
    Matrix precision_{0, 0};
    std::vector<double> weights_;
    double threshold_ = 0.0;
    double ridge_ = 0.0;
    std::size_t n_features_ = 0;
    bool fitted_ = false;
};

} // namespace toxcls
