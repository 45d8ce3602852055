#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "needlebench/ensemble.hpp"
#include "needlebench/gp.hpp"
#include "needlebench/kernels.hpp"

namespace needlebench {

// KL divergence between N(mu1, sigma^2) and N(mu2, sigma^2).
double gaussian_kl(double mu1, double mu2, double sigma);

// Expectation-transfer bound E_m[a] <= E_0[a] + A sqrt(D(P_0 || P_m)).
double auer_gap(double e0, double A, double div);

// Horizon below which the averaged simple regret is forced to stay >= epsilon:
// M sigma^2 / (4 C^2 epsilon^2), with M from the construction at (epsilon, B).
double simple_regret_threshold(const KernelSpec& spec, const BumpProfile& profile, double epsilon,
                               double B, double sigma, double C = 1.0);

// Same formula at an explicitly supplied member count.
double simple_regret_threshold_for_count(long long M, double epsilon, double sigma, double C);

struct CumulativeLower {
    double R_lower = 0.0;   // T * eps_star
    double eps_star = 0.0;  // consistent solution of eps = sqrt(M(eps) sigma^2 / (8 C'^2 T))
    double residual = 0.0;  // relative defect of the defining relation at eps_star
    long long M = 0;
    int iterations = 0;
};
CumulativeLower cumulative_regret_lower(const KernelSpec& spec, const BumpProfile& profile,
                                        double T, double B, double sigma, double C_prime = 1.0);

// Probability floor (1 - eta) / (4 - eta) for reaching regret eta * epsilon.
double high_prob_conversion(double eta);

// Greedy maximization of 1/2 log det(I + sigma^{-2} K_S) over the candidate
// grid; returns the running estimate (t, gamma_hat_t).  A lower bound on the
// information-gain maximum, labeled an estimate in all reports.
std::vector<std::pair<int, double>> info_gain_greedy(const KernelSpec& spec,
                                                     const std::vector<Point>& candidates, int T,
                                                     double sigma);
std::vector<std::pair<int, double>> info_gain_greedy_from_cov(const Eigen::MatrixXd& K, int T,
                                                              double sigma);

// sqrt(T B gamma + T gamma^2), constants set to one; a shape, not a certificate.
double upper_bound_sri(double gamma, double B, double T);

// Back-solve the smallest constant making the finite-sample regret chain valid
// for this ensemble, using the exact vbar tables in place of the O(.) steps.
double calibrate_constant(const NeedleEnsemble& ens);

struct ExponentCell {
    double t_power = 0.0;    // T exponent (cumulative rows) or 1/eps exponent (simple rows)
    double log_power = 0.0;  // power of the log factor, when the row is log-driven
    bool valid = true;       // Matern Sri09 rows need 2 nu > d (d+1)
    std::string form;        // rendered form, e.g. "sqrt(T (log T)^0.5)"
};

struct ExponentTable {
    KernelSpec spec;
    ExponentCell cumulative_lower, cumulative_sri, cumulative_conjectured;
    ExponentCell simple_lower, simple_sri, simple_conjectured;
};
ExponentTable exponent_table(const KernelSpec& spec);
std::string exponent_table_text(const ExponentTable& table);
std::string exponent_table_json(const ExponentTable& table, int indent = 2);

} // namespace needlebench
