#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/propagator.hpp"

namespace spinchain {

// Second-order perturbative fidelity of the disordered chain around the
// clean one, evaluated at a perfect-transfer time t_n.
//
// Field disorder couples through O_l = sigma^z_l = 1 - 2|l><l| (sector
// form), coupling disorder through W_l = dH/d delta_l =
// 2 J_l (|l><l+1| + |l+1><l|). For an operator O define the interaction-
// picture overlaps g_j(s) = <j| e^{iHs} O e^{-iHs} |1> and
// G_j = int_0^t g_j(s) ds. Then
//   C_l = G_1 for O_l             (real)
//   D_ll = int_0^t ds int_0^s ds' <1|O_l(s) O_l(s')|1>  (time ordered)
//   E_l = G_1 for W_l             (real)
//   F_ll = same as D_ll with W_l
// and 2 Re D_ll = sum_j |G_j|^2, which is how the real parts are evaluated.
// The averaged fidelity is
//   1 - (eps_b^2/3) sum (2 Re D_kk - C_k^2)/3 - (eps_j^2/3) sum (2 Re F_kk - E_k^2)/3,
// one 1/3 being the variance of a uniform variable on [-eps, eps], the other
// the slope of F(|f|) near |f| = 1.

struct CleanPropagatorTable {
    ChainSpec spec;
    SpectralDecomposition decomposition;
    double step = 0.0;  // quadrature step upper bound

    std::size_t dim() const { return decomposition.dim(); }
};

// Step h such that samples_per_period points cover the shortest spectral
// period 2 pi / (E_max - E_min).
double spectral_quadrature_step(const SpectralDecomposition& sd, double samples_per_period);

// Clean-chain table; step defaults to 20 samples per shortest period.
CleanPropagatorTable make_propagator_table(const ChainSpec& spec, double step = 0.0);

struct PerturbationCoefficients {
    double t = 0.0;
    double step = 0.0;  // quadrature step actually used
    std::vector<double> c;
    std::vector<Complex> d_diag;
    std::vector<double> e;
    std::vector<Complex> f_diag;
    double richardson_change = 0.0;  // max relative change from h to h/2

    // sum_k (2 Re D_kk - C_k^2) and sum_k (2 Re F_kk - E_k^2).
    double field_sum() const;
    double coupling_sum() const;
};

class CoarseQuadratureError : public std::runtime_error {
public:
    CoarseQuadratureError(const std::string& what, double change) : std::runtime_error(what), change_(change) {}
    double change() const { return change_; }

private:
    double change_;
};

// Composite Simpson on [0, t] with the table step and with half of it; the
// finer result is returned. If any coefficient moves by more than
// `tolerance` relative to the largest coefficient, CoarseQuadratureError is
// thrown.
PerturbationCoefficients compute_coefficients(const CleanPropagatorTable& table, double t,
                                              double tolerance = 1e-6);

// Halves the step until compute_coefficients accepts (at most max_halvings
// times).
PerturbationCoefficients compute_coefficients_converged(const CleanPropagatorTable& table, double t,
                                                        double tolerance = 1e-6, int max_halvings = 8);

// The second-order formula, exactly as written above.
double perturbative_fidelity(const PerturbationCoefficients& coeffs, double eps_j, double eps_b);

}  // namespace spinchain
