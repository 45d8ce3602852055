#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "needlebench/ensemble.hpp"
#include "needlebench/kernels.hpp"

namespace needlebench {

struct SpectralNorm {
    double value = 0.0;          // sqrt of the weighted energy integral
    double error_estimate = 0.0; // conservative quadrature error on the value
    int nodes = 0;
};

// || f ||_k = sqrt( \int_{||xi|| <= R} |G(xi)|^2 / K(xi) dxi ) for a radial
// spectrum G with compact support radius R, by adaptive radial quadrature.
SpectralNorm rkhs_norm_spectral(const KernelSpec& spec,
                                const std::function<double(double)>& G_radial, double R,
                                double rel_tol = 1e-8, int n_start = 64);

struct ChainStep {
    std::string label;
    double value = 0.0; // squared-norm scale
};

// Numerical certificate that the uncropped needle g respects ||g||_k <= B.
// Cropping to [0,1]^d cannot increase the norm, so the certificate covers
// every ensemble member.
struct NormCertificate {
    double norm_numeric = 0.0;     // quadrature value of the spectral integral
    double norm_chain_bound = 0.0; // final analytic bound of the kernel-specific chain
    double budget = 0.0;
    double margin = 0.0; // budget - norm_numeric
    double quadrature_error_estimate = 0.0;
    std::vector<ChainStep> chain;   // squared-norm bounding chain, tightest first
    bool side_conditions_ok = true; // chain steps past the exact ones need these
    std::vector<std::string> side_condition_notes;
};

// Computes the certificate without judging it; callers that need the
// spec-level error behavior use certify_ensemble_norm.
NormCertificate compute_certificate(const NeedleEnsemble& ens);

// Throws CertificationError when margin < -quadrature_error_estimate.
NormCertificate certify_ensemble_norm(const NeedleEnsemble& ens);

inline bool certificate_ok(const NormCertificate& c) {
    return c.margin >= -c.quadrature_error_estimate;
}

std::string certificate_to_json(const NormCertificate& cert, int indent = 2);

} // namespace needlebench
