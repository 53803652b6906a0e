#pragma once

#include <optional>
#include <span>
#include <vector>

#include "camid/types.hpp"

namespace camid {

// Per-dimension affine rescale to zero mean and unit variance, fitted on
// training rows with population std (divisor n). Degenerate columns
// (std < 1e-12) pass through unscaled.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    int dim() const { return static_cast<int>(mean.size()); }
    FeatureMatrix apply(const FeatureMatrix& x) const;
    void apply_row(const double* in, double* out) const;
};

Standardizer fit_standardizer(const FeatureMatrix& train);

struct KernelSpec {
    enum class Kind { Linear, Rbf };
    Kind kind = Kind::Rbf;
    double gamma = 1.0;  // rbf only, > 0
};

// linear: <a,b>; rbf: exp(-gamma * ||a-b||^2). Throws on dim mismatch.
double kernel_eval(std::span<const double> a, std::span<const double> b, const KernelSpec& spec);

// The "scale" heuristic of the cited stack: 1 / (d * Var(X)) over all
// entries of the (standardized) training matrix, falling back to 1/d for a
// degenerate matrix.
double default_rbf_gamma(const FeatureMatrix& standardized_train);

struct SvmTrainOptions {
    double c = 1.0;
    double tol = 1e-3;                  // KKT tolerance
    long max_pair_updates = 100000;     // iteration cap, reported when hit
    bool record_objective = false;      // keep the dual objective after every pair update
};

// Soft-margin dual solution. Only rows with alpha > 0 are retained.
struct BinarySvmModel {
    KernelSpec kernel;
    double c = 1.0;
    double bias = 0.0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> alpha;    // 0 < alpha_i <= C
    std::vector<int> sv_labels;   // +1 / -1
    bool converged = true;
    long pair_updates = 0;
    double final_kkt_violation = 0.0;       // over the full training set
    std::vector<double> objective_history;  // filled only when recorded
};

// Deterministic SMO (fixed index traversal). y entries must be +1/-1 with
// both classes present.
BinarySvmModel train_binary_svm(const FeatureMatrix& x, const std::vector<int>& y,
                                const KernelSpec& spec, const SvmTrainOptions& options);

// f(x) = sum_i alpha_i y_i k(x_i, x) + b
double decision_value(const BinarySvmModel& model, std::span<const double> x);

// One-vs-rest: one binary model per class, prediction by argmax of decision
// values, ties broken by lowest class index.
struct MulticlassSvmModel {
    int n_classes = 0;
    std::vector<BinarySvmModel> per_class;
};

MulticlassSvmModel train_multiclass(const FeatureMatrix& x, const KernelSpec& spec,
                                    const SvmTrainOptions& options);

std::vector<double> decision_values(const MulticlassSvmModel& model, std::span<const double> x);
std::vector<int> predict(const MulticlassSvmModel& model, const FeatureMatrix& x);

}  // namespace camid
