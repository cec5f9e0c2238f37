// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strigraph/rewrite.hpp"
#include "strigraph/tensor_eval.hpp"

namespace strigraph {

/// A signature with a valuation and a rule set that is sound under it.
struct Theory {
  std::string name;
  SignaturePtr signature;
  Valuation valuation;
  RewriteSystem rules;

  /// Rule name to law tag.
  std::map<std::string, std::string> tags() const;
};

/// Evaluates both sides of every rule without kept boxes and records the
/// scalar. Throws kInvalidRule for a rule whose sides are not proportional
/// or whose recorded scalar disagrees.
void certify(Theory& t, double tol = 1e-9);

/// Z/X calculus on one qubit object "q". Generators z_ and x_ mul, unit,
/// comul, counit; z_phase and x_phase with angle data; h.
Theory zx_theory();

/// GHZ algebra (g_ prefix) and W algebra (w_ prefix) on "q", plus tick.
Theory gw_theory();

/// Adds `state : I -> object` with opaque data naming one of `states`.
Theory with_states(const Theory& t, const std::string& object, std::map<std::string, Tensor> states);

/// The four structure maps of a commutative Frobenius algebra on one space.
struct FrobeniusTensors {
  Tensor mul;
  Tensor unit;
  Tensor comul;
  Tensor counit;

  int dim() const;
};

/// Reads prefix_mul, prefix_unit, prefix_comul and prefix_counit.
FrobeniusTensors algebra(const Valuation& v, const std::string& prefix);

/// Throws kShapeMismatch unless the four maps have the shapes of an algebra.
void require_algebra_shapes(const FrobeniusTensors& a);

/// Associativity, unit, commutativity, their duals, and the Frobenius law.
bool check_frobenius_algebra(const FrobeniusTensors& a, double tol = 1e-9);

/// mu . delta = 1.
bool check_special(const FrobeniusTensors& a, double tol = 1e-9);
/// circle * (mu . delta) = lolli . cololli.
bool check_antispecial(const FrobeniusTensors& a, double tol = 1e-9);

/// mu . delta . eta, epsilon . mu . delta and epsilon . mu . delta . eta.
Eigen::VectorXcd lolli(const FrobeniusTensors& a);
Eigen::RowVectorXcd cololli(const FrobeniusTensors& a);
Complex circle(const FrobeniusTensors& a);

/// The computational-basis algebra O and the group algebra O' of the
/// product of cyclic groups with the given orders.
std::pair<FrobeniusTensors, FrobeniusTensors> group_pair(const std::vector<int>& factors);

/// One law evaluated on graphs: the scalar with lhs = scalar * rhs, if any.
struct LawCheck {
  std::string law;
  std::optional<Complex> scalar;
};

/// Scaled bialgebra equations for (mu_O, delta_P) and (mu_P, delta_O).
std::vector<LawCheck> strong_complementarity_laws(const FrobeniusTensors& o, const FrobeniusTensors& p,
                                                  double tol = 1e-9);
bool check_strong_complementarity(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol = 1e-9);

/// Hopf law mu_P . (1 (x) S) . delta_O ~ eta_P . epsilon_O with the antipode
/// S built from the cap of P and the cup of O, in both orientations.
std::vector<LawCheck> hopf_laws(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol = 1e-9);
bool check_hopf(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol = 1e-9);

/// Point of the complex projective line: finite k, infinity, or undefined.
struct CP1Point {
  enum class Kind { kFinite, kInfinity, kUndefined };
  Kind kind = Kind::kUndefined;
  Complex value{};

  static CP1Point finite(Complex k) { return {Kind::kFinite, k}; }
  static CP1Point infinity() { return {Kind::kInfinity, {}}; }
  static CP1Point undefined() { return {Kind::kUndefined, {}}; }
};

std::string to_string(const CP1Point& p);
bool approx_equal(const CP1Point& a, const CP1Point& b, double tol = 1e-9);

/// |0> + k|1>, |1> for infinity, zero for undefined.
Eigen::Vector2cd numket(const CP1Point& p);
/// Reads a vector back up to scalar; norms at or below `zero` are undefined.
CP1Point decode(const Eigen::Vector2cd& v, double zero);

/// Applies the GHZ multiplication to numket(a) (x) numket(b).
CP1Point cp1_mul(const CP1Point& a, const CP1Point& b);
/// Applies the W multiplication read through the tick, tick . mu_W . (tick (x) tick).
CP1Point cp1_add(const CP1Point& a, const CP1Point& b);

/// Symmetric state psi (three outputs), effect phi (two inputs), effect xi
/// (one input) satisfying the snake and the gluing symmetry equations.
bool check_frobenius_state(const Tensor& psi, const Tensor& phi, const Tensor& xi, double tol = 1e-9);
/// The effect phi solving the snake equation for psi and xi, if one exists.
std::optional<Tensor> frobenius_effect(const Tensor& psi, const Tensor& xi, double tol = 1e-9);
/// delta = (1 (x) 1 (x) phi)(psi (x) 1), epsilon = xi,
/// mu = (phi (x) 1)(1 (x) delta), eta = (xi (x) xi (x) 1) psi.
FrobeniusTensors algebra_from_state(const Tensor& psi, const Tensor& phi, const Tensor& xi);

/// Unnormalized |000> + |111> and |100> + |010> + |001>.
Tensor ghz_state();
Tensor w_state();

// Witness constructions.

Tensor hadamard_matrix();
Tensor cnot_matrix();
Tensor swap_matrix();

/// Bare crossing of two q wires.
StringGraph swap_graph(const SignaturePtr& sig);
/// Z copy on the control, X merge into the target.
StringGraph zx_cnot(const SignaturePtr& sig);
/// CNOT(a,b) . CNOT(b,a) . CNOT(a,b).
StringGraph zx_cnot3(const SignaturePtr& sig);
/// Z_first, then X_second, then Z_third.
StringGraph zx_euler(const SignaturePtr& sig, Angle first, Angle second, Angle third);

/// Rule names of the bundled CNOT^3 = swap derivation.
std::vector<std::string> cnot3_swap_script();
/// Runs the script on zx_cnot3 until it reaches swap_graph.
std::optional<NormalizeResult> cnot3_swap_derivation(const Theory& zx);

/// (1 (x) X)(delta_G (x) 1) with X(c, t) = mu_W(tick q, tick mu_W(tick p, c))
/// and (p, q) = delta_W(tick t).
StringGraph gw_cnot(const SignaturePtr& sig);
/// gw_cnot with the control fed by w_unit (|1>) or tick . w_unit (|0>).
StringGraph gw_cnot_on(const SignaturePtr& sig, bool control);
/// What gw_cnot_on must rewrite to: the control point beside tick or a bare wire.
StringGraph gw_cnot_expected(const SignaturePtr& sig, bool control);
std::vector<std::string> gw_cnot_script(bool control);
std::optional<NormalizeResult> gw_cnot_derivation(const Theory& gw, bool control);

/// Single-qubit maps built from GHZ/W generators and states.
struct Construction {
  Theory theory;
  StringGraph graph;
};

/// GHZ phase of a|0> + b|1>: diag(a, b).
Construction gw_diagonal(Complex a, Complex b);
/// W phase of c|0> + |1>: [[1, c], [0, 1]].
Construction gw_upper(Complex c);
/// tick . (W phase of d|0> + |1>) . tick: [[1, 0], [d, 1]].
Construction gw_lower(Complex d);
/// M = P L D U. Throws kShapeMismatch for [[0, c], [0, e]] with c, e nonzero,
/// which has no such form.
Construction gw_single_qubit(const Eigen::Matrix2cd& m);

/// mu_W . (phi_a (x) phi_a) = (epsilon_W . tick . a) phi_a . mu_W, where
/// phi_a is right GHZ multiplication by a.
bool check_distributivity(const Eigen::Vector2cd& a, double tol = 1e-9);

}  // namespace strigraph
