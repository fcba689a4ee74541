#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmod/involutive.hpp"

namespace dmod {

// A residue class of M = D^m / (rows of D) killed by nonzero operators.
struct TorsionElement {
  Row representative;  // involutive normal form modulo D
  std::vector<ScalarOperator> annihilators;
  // Set when the element was obtained as b∘z from another torsion element z
  // by splitting off a common factor b of z's annihilators.
  bool derived = false;
};

struct ParamVerdict {
  bool torsion_free = false;
  OperatorMatrix adjoint;         // ad(D)
  OperatorMatrix adjoint_cc;      // CC(ad(D)) = ad(D_{-1})
  OperatorMatrix parametrization; // D_{-1}
  OperatorMatrix dprime;          // CC(D_{-1})
  // A row of D' outside the module of D when torsion is present.
  std::optional<Row> witness;
  std::vector<TorsionElement> torsion;
};

struct DualityOptions {
  CompletionOptions completion;
  // Largest annihilator order searched per torsion generator.
  unsigned annihilator_order = 4;
  bool extract_torsion = true;
};

// Five steps: D, ad(D), CC(ad(D)), D_{-1} = ad(CC(ad(D))), D' = CC(D_{-1}).
// Completion failures are rethrown as CapExceeded naming the step.
ParamVerdict double_duality_test(const OperatorMatrix& d, const DualityOptions& opts = {});
std::vector<TorsionElement> torsion_elements(const OperatorMatrix& d, const DualityOptions& opts = {});

// Torsion generators among the rows of dprime, with verified annihilators.
std::vector<TorsionElement> extract_torsion(const OperatorMatrix& d, const OperatorMatrix& dprime,
                                            const DualityOptions& opts = {});
// K-basis of the annihilators of minimal order of the class of z, empty when
// none exists up to max_order.
std::vector<ScalarOperator> annihilators(const Row& z, const InvolutiveBasis& basis, unsigned max_order);

struct KalmanVerdict {
  std::size_t rank = 0;  // rank of (B, AB, ..., A^{m-1}B)
  bool rank_controllable = false;
  bool duality_controllable = false;
  bool agree() const { return rank_controllable == duality_controllable; }
};

// -y' + A y + B u = 0 on one variable "t".
OperatorMatrix kalman_operator(const std::vector<std::vector<Rational>>& a, const std::vector<std::vector<Rational>>& b);
KalmanVerdict kalman_test(const std::vector<std::vector<Rational>>& a, const std::vector<std::vector<Rational>>& b);

struct InjectivityReport {
  // ad(D) injective for generic values of the coefficients.
  bool injective = false;
  // Product of the non-monomial pivot factors that must not vanish; 1 when
  // injectivity holds unconditionally.
  Polynomial obstruction{1};
  // Zero-order consequences of the adjoint system found along the way.
  std::vector<std::string> zero_order;
  unsigned order_reached = 0;
};

// n = 1 and D surjective. Eliminates in the jets of the adjoint system until
// all test functions are forced to vanish or the order cap is reached.
InjectivityReport adjoint_injectivity_test(const OperatorMatrix& d, unsigned max_order = 0);

// Copy of d in a context where the listed parameters are replaced by constants.
// Jets of order >= 1 of a specialized parameter become 0.
OperatorMatrix specialize(const OperatorMatrix& d, const std::vector<std::pair<std::string, Rational>>& values);

struct ParametrizationReport {
  bool composes_to_zero = false;   // (a) D∘P = 0
  bool generates_cc = false;       // (b) CC(P) row-module-equal D
  std::optional<Row> cc_witness;
  bool left_inverse_searched = false;
  std::optional<OperatorMatrix> left_inverse;  // L∘P = I
  unsigned inverse_order_cap = 0;
};

ParametrizationReport verify_parametrization(const OperatorMatrix& d, const OperatorMatrix& candidate,
                                             int inverse_order_cap = 2, CompletionOptions opts = {});
// Operator L of order <= order with L∘P = I, if any.
std::optional<OperatorMatrix> find_left_inverse(const OperatorMatrix& p, unsigned order);

// Plane euclidean case: Cosserat equations as minus the adjoint of the first
// Spencer operator of Killing + Christoffel, and their first order parametrization.
struct CosseratReport {
  OperatorMatrix spencer;          // 6 x 3
  OperatorMatrix equations;        // 3 x 6 on (sigma11, sigma12, sigma21, sigma22, mu1, mu2)
  OperatorMatrix parametrization;  // 6 x 3 on (phi1, phi2, phi3)
  bool equations_match = false;    // equal to the displayed Cosserat equations
  bool solves = false;             // equations ∘ parametrization = 0
  bool airy = false;               // phi = (d2, d1, -1) phi gives the Airy stresses, mu = 0
  bool zero_potentials = false;
  bool passed() const { return equations_match && solves && airy && zero_potentials; }
};

CosseratReport cosserat_parametrization_check();

}  // namespace dmod
