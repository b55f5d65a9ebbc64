#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/numerics.hpp"

namespace toxcls {

/// Gaussian naive Bayes for binary labels. Per-class feature means and
/// maximum-likelihood variances (divisor n_c), with variances floored at
/// `variance_floor` so constant features cannot produce a zero denominator.
class GaussianNaiveBayes {
  public:
    explicit GaussianNaiveBayes(double variance_floor = 1e-9)
        : variance_floor_(variance_floor) {
        if (!(variance_floor > 0.0)) throw ArgumentError("variance floor must be positive");
    }

    void fit(const Matrix& x, const std::vector<int>& y) {
        if (x.rows() != y.size()) throw DimensionError("naive Bayes: rows and labels differ");
        if (x.rows() == 0) throw ArgumentError("naive Bayes: empty training set");
        n_features_ = x.cols();
        std::size_t counts[2] = {0, 0};
        for (int label : y) {
            if (label != 0 && label != 1) throw ArgumentError("naive Bayes: labels must be 0 or 1");
            ++counts[label];
        }
        if (counts[0] == 0 || counts[1] == 0)
            throw ArgumentError("naive Bayes: training set contains a single class");
        if (counts[0] < 2 || counts[1] < 2)
            throw ArgumentError("naive Bayes: each class needs at least 2 samples");

        for (int c = 0; c < 2; ++c) {
            mean_[c].assign(n_features_, 0.0);
            var_[c].assign(n_features_, 0.0);
            log_prior_[c] = std::log(static_cast<double>(counts[c]) /
                                     static_cast<double>(x.rows()));
        }
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const int c = y[i];
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < n_features_; ++j) mean_[c][j] += xi[j];
        }
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < n_features_; ++j)
                mean_[c][j] /= static_cast<double>(counts[c]);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const int c = y[i];
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < n_features_; ++j) {
                const double d = xi[j] - mean_[c][j];
                var_[c][j] += d * d;
            }
        }
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < n_features_; ++j) {
                var_[c][j] /= static_cast<double>(counts[c]);
                if (var_[c][j] < variance_floor_) var_[c][j] = variance_floor_;
            }
        fitted_ = true;
    }

    /// Unnormalized class log posteriors: log p(c) + sum_j log N(x_j; mu, var).
    std::vector<double> log_posterior(const double* x) const {
        require_fitted();
        std::vector<double> lp(2);
        for (int c = 0; c < 2; ++c) {
            double acc = log_prior_[c];
            for (std::size_t j = 0; j < n_features_; ++j) {
                const double d = x[j] - mean_[c][j];
                acc += -0.5 * std::log(2.0 * std::numbers::pi * var_[c][j]) -
                       d * d / (2.0 * var_[c][j]);
            }
            lp[c] = acc;
        }
        return lp;
    }

    std::vector<double> predict_proba(const double* x) const { return softmax(log_posterior(x)); }

    int predict(const double* x) const {
        const auto lp = log_posterior(x);
        return lp[1] > lp[0] ? 1 : 0;
    }

    std::vector<int> predict(const Matrix& x) const {
        require_fitted();
        if (x.cols() != n_features_) throw DimensionError("naive Bayes: feature count mismatch");
        std::vector<int> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
        return out;
    }

    const std::vector<double>& mean(int c) const { return mean_[check_class(c)]; }
    const std::vector<double>& variance(int c) const { return var_[check_class(c)]; }
    double log_prior(int c) const { return log_prior_[check_class(c)]; }

    /// Rebuilds a fitted classifier from stored parameters (model loading).
    static GaussianNaiveBayes from_parameters(const std::vector<double>& mean0,
                                              const std::vector<double>& mean1,
                                              const std::vector<double>& var0,
                                              const std::vector<double>& var1,
                                              double log_prior0, double log_prior1) {
        if (mean0.empty() || mean1.size() != mean0.size() || var0.size() != mean0.size() ||
            var1.size() != mean0.size())
            throw DimensionError("naive Bayes: parameter vectors disagree in length");
        GaussianNaiveBayes nb;
        for (const auto* v : {&var0, &var1})
            for (double value : *v)
                if (!(value > 0.0))
                    throw ArgumentError("naive Bayes: stored variances must be positive");
        nb.n_features_ = mean0.size();
        nb.mean_[0] = mean0;
        nb.mean_[1] = mean1;
        nb.var_[0] = var0;
        nb.var_[1] = var1;
        nb.log_prior_[0] = log_prior0;
        nb.log_prior_[1] = log_prior1;
        nb.fitted_ = true;
        return nb;
    }

  private:
    static int check_class(int c) {
        if (c != 0 && c != 1) throw ArgumentError("class index must be 0 or 1");
        return c;
    }
    void require_fitted() const {
        if (!fitted_) throw ArgumentError("naive Bayes: fit() has not been called");
    }

    double variance_floor_;
    std::size_t n_features_ = 0;
    std::vector<double> mean_[2];
    std::vector<double> var_[2];
    double log_prior_[2] = {0.0, 0.0};
    bool fitted_ = false;
};

/// Multinomial naive Bayes over nonnegative count features with Laplace
/// smoothing. Intended for raw term counts rather than tf-idf weights.
class MultinomialNaiveBayes {
  public:
    explicit MultinomialNaiveBayes(double alpha = 1.0) : alpha_(alpha) {
        if (!(alpha > 0.0)) throw ArgumentError("smoothing alpha must be positive");
    }

    void fit(const Matrix& x, const std::vector<int>& y) {
        if (x.rows() != y.size()) throw DimensionError("naive Bayes: rows and labels differ");
        if (x.rows() == 0) throw ArgumentError("naive Bayes: empty training set");
        n_features_ = x.cols();
        std::size_t counts[2] = {0, 0};
        for (int label : y) {
            if (label != 0 && label != 1) throw ArgumentError("naive Bayes: labels must be 0 or 1");
            ++counts[label];
        }
        if (counts[0] == 0 || counts[1] == 0)
            throw ArgumentError("naive Bayes: both classes must be present");

        for (int c = 0; c < 2; ++c) {
            log_prob_[c].assign(n_features_, 0.0);
            log_prior_[c] = std::log(static_cast<double>(counts[c]) /
                                     static_cast<double>(x.rows()));
        }
        double totals[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const int c = y[i];
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < n_features_; ++j) {
                if (xi[j] < 0.0)
                    throw ArgumentError("multinomial naive Bayes: negative feature value");
                log_prob_[c][j] += xi[j];
                totals[c] += xi[j];
            }
        }
        for (int c = 0; c < 2; ++c) {
            const double denom = totals[c] + alpha_ * static_cast<double>(n_features_);
            for (std::size_t j = 0; j < n_features_; ++j)
                log_prob_[c][j] = std::log((log_prob_[c][j] + alpha_) / denom);
        }
        fitted_ = true;
    }

    std::vector<double> log_posterior(const double* x) const {
        if (!fitted_) throw ArgumentError("naive Bayes: fit() has not been called");
        std::vector<double> lp(2);
        for (int c = 0; c < 2; ++c) {
            double acc = log_prior_[c];
            for (std::size_t j = 0; j < n_features_; ++j) acc += x[j] * log_prob_[c][j];
            lp[c] = acc;
        }
        return lp;
    }

    int predict(const double* x) const {
        const auto lp = log_posterior(x);
        return lp[1] > lp[0] ? 1 : 0;
    }

    std::vector<int> predict(const Matrix& x) const {
        if (!fitted_) throw ArgumentError("naive Bayes: fit() has not been called");
        if (x.cols() != n_features_) throw DimensionError("naive Bayes: feature count mismatch");
        std::vector<int> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
        return out;
    }

    const std::vector<double>& log_probability(int c) const {
        if (c != 0 && c != 1) throw ArgumentError("class index must be 0 or 1");
        return log_prob_[c];
    }
    double log_prior(int c) const {
        if (c != 0 && c != 1) throw ArgumentError("class index must be 0 or 1");
        return log_prior_[c];
    }

    static MultinomialNaiveBayes from_parameters(const std::vector<double>& log_prob0,
                                                 const std::vector<double>& log_prob1,
                                                 double log_prior0, double log_prior1) {
        if (log_prob0.empty() || log_prob1.size() != log_prob0.size())
            throw DimensionError("naive Bayes: parameter vectors disagree in length");
        MultinomialNaiveBayes nb;
        nb.n_features_ = log_prob0.size();
        nb.log_prob_[0] = log_prob0;
        nb.log_prob_[1] = log_prob1;
        nb.log_prior_[0] = log_prior0;
        nb.log_prior_[1] = log_prior1;
        nb.fitted_ = true;
        return nb;
    }

  private:
    double alpha_;
    std::size_t n_features_ = 0;
    std::vector<double> log_prob_[2];
    double log_prior_[2] = {0.0, 0.0};
    bool fitted_ = false;
};

} // namespace toxcls
