#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "needlebench/kernels.hpp"
#include "needlebench/spectral.hpp"

namespace needlebench {

struct BuildOptions {
    bool strict = true;                 // reject M < 2 and side-condition violations
    std::optional<double> w0_override;  // bypass the width formula (diagnostics/tests)
};

// M shifted copies of one radial needle g(x) = a0 h(||x||/w0), peak 2 epsilon,
// laid out on a uniform grid of step w over [0,1]^d.  Member index 0 denotes
// the identically-zero reference function.
struct NeedleEnsemble {
    KernelSpec spec;
    double epsilon = 0.0;
    double B = 0.0;
    std::shared_ptr<const BumpProfile> profile;
    double w0 = 0.0;    // needle width, from the kernel-specific budget equation
    double w = 0.0;     // grid step, 2 zeta w0 (separation-safe; see docs)
    int per_dim = 0;    // needle count per dimension
    long long M = 0;    // per_dim^d
    double a0 = 0.0;    // amplitude 2 epsilon / h(0)
    bool degenerate = false; // single centered needle because floor(1/w) < 1
    std::vector<std::string> relaxed_violations; // conditions waived by strict=false

    std::vector<double> center(long long m) const; // m in 1..M
    std::vector<std::vector<double>> centers() const;
};

// Width and member count without building evaluator state; shared with the
// bounds module so threshold formulas stay in exact agreement with the builder.
struct EnsembleGeometry {
    double w0 = 0.0;
    double w = 0.0;
    int per_dim = 0;
    long long M = 0;
    bool degenerate = false;
    std::vector<std::string> violations;
};
EnsembleGeometry ensemble_geometry(const KernelSpec& spec, double epsilon, double B,
                                   const BumpProfile& profile,
                                   std::optional<double> w0_override = std::nullopt);

// Matern constants from the spectral-norm chain.
double matern_volume_constant(const KernelSpec& spec);       // c2
double matern_width(const KernelSpec& spec, double epsilon, double B, double h0);
double se_width(const KernelSpec& spec, double epsilon, double B, double h0);

// Needle count on a grid of step w in [0,1]^d (per-dimension floor).
long long member_count_for_step(double w, int d);

NeedleEnsemble build_ensemble(const KernelSpec& spec, double epsilon, double B,
                              std::shared_ptr<const BumpProfile> profile,
                              const BuildOptions& opts = {});

// f_m(x) for x in [0,1]^d; m = 0 is the zero member.  Range [-2eps, 2eps].
double eval_needle(const NeedleEnsemble& ens, long long m, const std::vector<double>& x);

// 1-based index of the grid cell containing x; boundary ties go to the lower
// cell, and points beyond the covered prefix map to the nearest covered cell.
long long region_index(const NeedleEnsemble& ens, const std::vector<double>& x);

// Certified upper bound on max_{x in R_j} f_m(x): radial tail envelope of the
// profile at the center-to-cell distance, padded by 1e-4 eps for the
// between-node slack and clamped to the needle range.  A 17^d sub-grid scan
// of the cell (the test oracle) never exceeds it.
double vbar(const NeedleEnsemble& ens, long long m, long long j);

// Dense sub-grid maximum used as the independent lower oracle for vbar.
double vbar_subgrid_scan(const NeedleEnsemble& ens, long long m, long long j,
                         int points_per_dim = 17);

struct VbarSums {
    double max_over_m_sum_j = 0.0;  // max_m sum_j vbar / eps
    double max_over_j_sum_m = 0.0;  // max_j sum_m vbar / eps
    double max_over_j_sum_m_sq = 0.0; // max_j sum_m vbar^2 / eps^2
};
VbarSums vbar_sums_report(const NeedleEnsemble& ens);

// {family, d, l, nu, epsilon, B, w0, w, M, zeta, h0, centers: [[...]]}
std::string ensemble_to_json(const NeedleEnsemble& ens, int indent = 2);

} // namespace needlebench
