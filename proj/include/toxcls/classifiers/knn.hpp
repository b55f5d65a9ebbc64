#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"

namespace toxcls {

enum class KnnMetric { euclidean, cosine };

/// k-nearest-neighbour classifier with majority vote. Neighbour order breaks
/// distance ties by lower training index, which keeps predictions independent
/// of sort implementation details. k must be odd so a binary vote cannot tie.
class KnnClassifier {
  public:
    explicit KnnClassifier(int k = 7, KnnMetric metric = KnnMetric::euclidean)
        : k_(k), metric_(metric) {
        if (k < 1) throw ArgumentError("knn: k must be positive");
        if (k % 2 == 0) throw ArgumentError("knn: k must be odd for binary voting");
    }

    void fit(Matrix x, std::vector<int> y) {
        if (x.rows() != y.size()) throw DimensionError("knn: rows and labels differ");
        if (x.rows() == 0) throw ArgumentError("knn: empty training set");
        for (int label : y)
            if (label != 0 && label != 1) throw ArgumentError("knn: labels must be 0 or 1");
        if (static_cast<std::size_t>(k_) > x.rows())
            throw ArgumentError("knn: k exceeds training set size");
        x_ = std::move(x);
        y_ = std::move(y);
        if (metric_ == KnnMetric::cosine) {
            norms_.resize(x_.rows());
            for (std::size_t i = 0; i < x_.rows(); ++i)
                norms_[i] = std::sqrt(dot(x_.row(i), x_.row(i), x_.cols()));
        }
    }

    double distance(const double* a, const double* b, double b_norm) const {
        if (metric_ == KnnMetric::euclidean)
            return std::sqrt(squared_distance(a, b, x_.cols()));
        const double a_norm = std::sqrt(dot(a, a, x_.cols()));
        if (a_norm == 0.0 || b_norm == 0.0) return 1.0; // orthogonal by convention
        return 1.0 - dot(a, b, x_.cols()) / (a_norm * b_norm);
    }

    /// Indices of the k nearest training rows, nearest first.
    std::vector<std::size_t> neighbors(const double* x) const {
        require_fitted();
        std::vector<std::pair<double, std::size_t>> dist(x_.rows());
        for (std::size_t i = 0; i < x_.rows(); ++i)
            dist[i] = {distance(x, x_.row(i), metric_ == KnnMetric::cosine ? norms_[i] : 0.0), i};
        const auto kth = dist.begin() + k_;
        std::partial_sort(dist.begin(), kth, dist.end());
        std::vector<std::size_t> idx(static_cast<std::size_t>(k_));
        for (int i = 0; i < k_; ++i) idx[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
        return idx;
    }

    int predict(const double* x) const {
        int votes = 0;
        for (std::size_t i : neighbors(x)) votes += y_[i];
        return 2 * votes > k_ ? 1 : 0;
    }

    std::vector<int> predict(const Matrix& x) const {
        require_fitted();
        if (x.cols() != x_.cols()) throw DimensionError("knn: feature count mismatch");
        std::vector<int> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
        return out;
    }

    int k() const { return k_; }
    KnnMetric metric() const { return metric_; }
    const Matrix& training_data() const {
        require_fitted();
        return x_;
    }
    const std::vector<int>& training_labels() const {
        require_fitted();
        return y_;
    }

  private:
    void require_fitted() const {
        if (x_.rows() == 0) throw ArgumentError("knn: fit() has not been called");
    }

    int k_;
    KnnMetric metric_;
    Matrix x_{0, 0};
    std::vector<int> y_;
    std::vector<double> norms_;
};

} // namespace toxcls
