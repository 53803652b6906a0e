#include "camid/svm.hpp"

#include <algorithm>
#include <cmath>

namespace camid {

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
    if (x.cols != dim()) throw Error("standardizer dimension mismatch");
    FeatureMatrix out = x;
    for (int r = 0; r < x.rows; ++r) apply_row(x.row(r), out.row(r));
    return out;
}

void Standardizer::apply_row(const double* in, double* out) const {
    const int d = dim();
    for (int j = 0; j < d; ++j) out[j] = (in[j] - mean[j]) / stddev[j];
}

Standardizer fit_standardizer(const FeatureMatrix& train) {
    if (train.rows < 2) throw Error("standardizer needs at least 2 rows");
    Standardizer s;
    s.mean.assign(train.cols, 0.0);
    s.stddev.assign(train.cols, 0.0);
    const double n = static_cast<double>(train.rows);
    for (int r = 0; r < train.rows; ++r) {
        const double* row = train.row(r);
        for (int j = 0; j < train.cols; ++j) s.mean[j] += row[j];
    }
    for (int j = 0; j < train.cols; ++j) s.mean[j] /= n;
    for (int r = 0; r < train.rows; ++r) {
        const double* row = train.row(r);
        for (int j = 0; j < train.cols; ++j) {
            const double d = row[j] - s.mean[j];
            s.stddev[j] += d * d;
        }
    }
    for (int j = 0; j < train.cols; ++j) {
        const double std = std::sqrt(s.stddev[j] / n);  // population std
        s.stddev[j] = std < 1e-12 ? 1.0 : std;          // degenerate column passes through
    }
    return s;
}

double kernel_eval(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
    if (a.size() != b.size()) throw Error("kernel dimension mismatch");
    if (spec.kind == KernelSpec::Kind::Linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
    }
    if (!(spec.gamma > 0.0)) throw ConfigError("rbf kernel requires gamma > 0");
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-spec.gamma * d2);
}

double default_rbf_gamma(const FeatureMatrix& standardized_train) {
    const std::size_t n = standardized_train.values.size();
    if (n == 0 || standardized_train.cols == 0) throw Error("empty feature matrix");
    double mean = 0.0;
    for (double v : standardized_train.values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : standardized_train.values) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double denom = static_cast<double>(standardized_train.cols) * (var > 1e-12 ? var : 1.0);
    return 1.0 / denom;
}

namespace {

// Deterministic SMO: fixed index traversal, no randomized restarts.
class SmoSolver {
public:
    SmoSolver(const FeatureMatrix& x, const std::vector<int>& y, const KernelSpec& spec,
              const SvmTrainOptions& options)
        : x_(x), y_(y), spec_(spec), opt_(options), n_(x.rows) {
        alpha_.assign(n_, 0.0);
        error_.resize(n_);
        for (int i = 0; i < n_; ++i) error_[i] = -static_cast<double>(y_[i]);  // f == 0 initially
        kernel_.resize(static_cast<std::size_t>(n_) * n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double k = kernel_eval(row(i), row(j), spec_);
                kernel_[static_cast<std::size_t>(i) * n_ + j] = k;
                kernel_[static_cast<std::size_t>(j) * n_ + i] = k;
            }
        }
    }

    void solve() {
        bool examine_all = true;
        int changed = 0;
        while ((changed > 0 || examine_all) && !capped_) {
            changed = 0;
            for (int i = 0; i < n_ && !capped_; ++i) {
                if (examine_all || is_free(alpha_[i])) changed += examine(i);
            }
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
    }

    BinarySvmModel finish() {
        BinarySvmModel model;
        model.kernel = spec_;
        model.c = opt_.c;
        model.bias = bias_;
        model.converged = !capped_;
        model.pair_updates = updates_;
        model.objective_history = std::move(objective_history_);
        model.final_kkt_violation = kkt_violation();
        for (int i = 0; i < n_; ++i) {
            if (alpha_[i] > 0.0) {
                model.alpha.push_back(alpha_[i]);
                model.sv_labels.push_back(y_[i]);
                model.support_vectors.emplace_back(x_.row(i), x_.row(i) + x_.cols);
            }
        }
        return model;
    }

private:
    std::span<const double> row(int i) const { return {x_.row(i), static_cast<std::size_t>(x_.cols)}; }
    double k(int i, int j) const { return kernel_[static_cast<std::size_t>(i) * n_ + j]; }
    bool is_free(double a) const { return a > 0.0 && a < opt_.c; }

    int examine(int i2) {
        const double y2 = y_[i2];
        const double alph2 = alpha_[i2];
        const double e2 = error_[i2];
        const double r2 = e2 * y2;  // y*f - 1
        const bool violates = (r2 < -opt_.tol && alph2 < opt_.c) || (r2 > opt_.tol && alph2 > 0.0);
        if (!violates) return 0;

        // second-choice heuristic: largest |E2 - E1| among free multipliers
        int best = -1;
        double best_gap = -1.0;
        for (int i = 0; i < n_; ++i) {
            if (!is_free(alpha_[i])) continue;
            const double gap = std::abs(e2 - error_[i]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return 1;
        for (int i1 = 0; i1 < n_ && !capped_; ++i1) {
            if (i1 == best || !is_free(alpha_[i1])) continue;
            if (take_step(i1, i2)) return 1;
        }
        for (int i1 = 0; i1 < n_ && !capped_; ++i1) {
            if (is_free(alpha_[i1]) || i1 == best) continue;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double c = opt_.c;
        const double alph1 = alpha_[i1], alph2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = error_[i1], e2 = error_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c, c + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - c);
            hi = std::min(c, alph1 + alph2);
        }
        if (lo >= hi) return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0.0) {
            a2 = alph2 + y2 * (e1 - e2) / eta;
            a2 = std::min(hi, std::max(lo, a2));
        } else {
            // evaluate the pair objective at both clip bounds
            const double f1 = y1 * (e1 + bias_) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 + bias_) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                  s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                  s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12)
                a2 = lo;
            else if (obj_lo > obj_hi + 1e-12)
                a2 = hi;
            else
                return false;
        }
        if (std::abs(a2 - alph2) < 1e-12 * (a2 + alph2 + 1e-12)) return false;

        double a1 = alph1 + s * (alph2 - a2);
        if (a1 < 1e-12) a1 = 0.0;
        if (a1 > c - 1e-12) a1 = c;
        if (a2 < 1e-12) a2 = 0.0;
        if (a2 > c - 1e-12) a2 = c;

        const double d1 = (a1 - alph1) * y1;
        const double d2 = (a2 - alph2) * y2;
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double new_bias;
        if (is_free(a1))
            new_bias = b1;
        else if (is_free(a2))
            new_bias = b2;
        else
            new_bias = 0.5 * (b1 + b2);
        const double db = new_bias - bias_;

        alpha_[i1] = a1;
        alpha_[i2] = a2;
        bias_ = new_bias;
        for (int i = 0; i < n_; ++i)
            error_[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;

        ++updates_;
        if (opt_.record_objective) objective_history_.push_back(objective());
        if (updates_ >= opt_.max_pair_updates) capped_ = true;
        return true;
    }

    double objective() const {
        double obj = 0.0;
        for (int i = 0; i < n_; ++i) obj += alpha_[i];
        for (int i = 0; i < n_; ++i) {
            if (alpha_[i] == 0.0) continue;
            for (int j = 0; j < n_; ++j) {
                if (alpha_[j] == 0.0) continue;
                obj -= 0.5 * alpha_[i] * alpha_[j] * y_[i] * y_[j] * k(i, j);
            }
        }
        return obj;
    }

    double kkt_violation() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double yf = (error_[i] + y_[i]) * y_[i];  // y * f
            double v = 0.0;
            if (alpha_[i] <= 0.0)
                v = std::max(0.0, 1.0 - yf);
            else if (alpha_[i] >= opt_.c)
                v = std::max(0.0, yf - 1.0);
            else
                v = std::abs(yf - 1.0);
            worst = std::max(worst, v);
        }
        return worst;
    }

    const FeatureMatrix& x_;
    const std::vector<int>& y_;
    KernelSpec spec_;
    SvmTrainOptions opt_;
    int n_;
    std::vector<double> alpha_;
    std::vector<double> error_;  // error[i] = f(i) - y[i]
    std::vector<double> kernel_;
    double bias_ = 0.0;
    long updates_ = 0;
    bool capped_ = false;
    std::vector<double> objective_history_;
};

}  // namespace

BinarySvmModel train_binary_svm(const FeatureMatrix& x, const std::vector<int>& y,
                                const KernelSpec& spec, const SvmTrainOptions& options) {
    if (x.rows < 2) throw Error("svm training needs at least 2 rows");
    if (static_cast<int>(y.size()) != x.rows) throw Error("label count mismatch");
    if (!(options.c > 0.0)) throw ConfigError("svm C must be > 0");
    x.ensure_finite("svm training features");
    int pos = 0, neg = 0;
    for (int v : y) {
        if (v == 1)
            ++pos;
        else if (v == -1)
            ++neg;
        else
            throw Error("binary svm labels must be +1 or -1");
    }
    if (pos == 0 || neg == 0) throw Error("single-class input: both classes must be present");

    SmoSolver solver(x, y, spec, options);
    solver.solve();
    return solver.finish();
}

double decision_value(const BinarySvmModel& model, std::span<const double> x) {
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        f += model.alpha[i] * model.sv_labels[i] * kernel_eval(model.support_vectors[i], x, model.kernel);
    }
    return f;
}

MulticlassSvmModel train_multiclass(const FeatureMatrix& x, const KernelSpec& spec,
                                    const SvmTrainOptions& options) {
    int n_classes = 0;
    for (int label : x.label_indices) {
        if (label < 0) throw Error("feature rows must carry class labels");
        n_classes = std::max(n_classes, label + 1);
    }
    if (n_classes < 2) throw Error("multiclass training needs at least 2 classes");

    MulticlassSvmModel model;
    model.n_classes = n_classes;
    model.per_class.reserve(n_classes);
    std::vector<int> y(x.rows);
    for (int c = 0; c < n_classes; ++c) {
        for (int r = 0; r < x.rows; ++r) y[r] = x.label_indices[r] == c ? 1 : -1;
        model.per_class.push_back(train_binary_svm(x, y, spec, options));
    }
    return model;
}

std::vector<double> decision_values(const MulticlassSvmModel& model, std::span<const double> x) {
    std::vector<double> values;
    values.reserve(model.per_class.size());
    for (const auto& binary : model.per_class) values.push_back(decision_value(binary, x));
    return values;
}

std::vector<int> predict(const MulticlassSvmModel& model, const FeatureMatrix& x) {
    std::vector<int> out;
    out.reserve(x.rows);
    for (int r = 0; r < x.rows; ++r) {
        const auto values = decision_values(model, {x.row(r), static_cast<std::size_t>(x.cols)});
        int best = 0;
        for (int c = 1; c < static_cast<int>(values.size()); ++c) {
            if (values[c] > values[best]) best = c;  // ties keep the lowest index
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace camid
