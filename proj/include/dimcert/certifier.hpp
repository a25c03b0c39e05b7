// Copyright 2026 The dimcert Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dimcert/envelope.hpp"
#include "dimcert/hubbard.hpp"
#include "dimcert/modes.hpp"
#include "dimcert/reference.hpp"

namespace dimcert {

// Gram matrix of the fringe basis under the |w|^2 measure.
//
// Unknowns are stacked as [Re g over all modes, Im g over the modes that are
// not self-conjugate]. The real and imaginary blocks decouple. Products are
// evaluated matrix-free through the per-species kernel
//   K_s(e, d) = sum over orderings (s, t) of e and d of prod_n I(s_n - t_n),
// and the full kernel is the Kronecker product over species.
class OverlapOperator {
 public:
  OverlapOperator(const ModeSpace& modes, const GaussianEnvelope& envelope,
                  double max_condition = 1e12);
  // Same structure with a user-supplied single-atom overlap I(gamma).
  OverlapOperator(const ModeSpace& modes, const std::function<double(int)>& overlap,
                  double max_condition = 1e12);

  const ModeSpace& modes() const { return *modes_; }
  std::size_t dim() const { return modes_->real_dim(); }
  const RealMatrix& species_kernel() const { return K_; }
  double condition_number() const { return condition_; }

  // Full-space kernel element between two orbits.
  double kernel(std::size_t full_e, std::size_t full_d) const;
  RealMatrix dense() const;
  void apply(const RealVector& x, RealVector& y) const;
  // Exact inverse, applied through the per-species kernel inverses.
  void precondition(const RealVector& r, RealVector& z) const;

 private:
  void init(const std::function<double(int)>& overlap, double max_condition);
  void kron(const RealMatrix& M, std::vector<double>& X) const;
  void embed(const RealVector& x, std::vector<double>& sym, std::vector<double>& anti,
             bool inverse) const;
  void restrict(const std::vector<double>& sym, const std::vector<double>& anti, RealVector& y,
                bool inverse) const;

  const ModeSpace* modes_;
  RealMatrix K_;
  RealMatrix Kinv_;
  double condition_ = 1.0;
};

struct CGResult {
  RealVector x;
  int iterations = 0;
  double residual = 0.0;
};

// Preconditioned conjugate gradient. Throws NumericalError when the relative
// residual does not reach `tol` within `max_iter` steps.
CGResult conjugate_gradient(const std::function<void(const RealVector&, RealVector&)>& A,
                            const std::function<void(const RealVector&, RealVector&)>& M,
                            const RealVector& b, double tol, int max_iter);

struct SolveOptions {
  std::size_t dense_limit = 2000;
  double tolerance = 1e-10;
};

struct SolveResult {
  ComplexVector g;
  std::string method;
  int iterations = 0;
  double residual = 0.0;
};

// Stacks complex mode coefficients into the real layout and back.
RealVector stack_coefficients(const ModeSpace& modes, const ComplexVector& c);
ComplexVector unstack_coefficients(const ModeSpace& modes, const RealVector& x);

// Solves Q x = [Re c, -Im c] and returns g = x_R + i x_I.
SolveResult solve_g(const OverlapOperator& Q, const ComplexVector& c, const SolveOptions& opt = {});
// Solves the real block Q_RR v = a.
// Expected basis-function means, before division by the zero mode, for
// coherence sums g. Inverse of solve_g.
ComplexVector predicted_coefficients(const OverlapOperator& Q, const ComplexVector& g);
RealVector solve_real_block(const OverlapOperator& Q, const RealVector& a,
                            const SolveOptions& opt = {});

// Means of the fringe basis functions over momentum shots. Rows of `k` are
// shots, columns are atoms in species-major order.
ComplexVector project_coefficients(const ModeSpace& modes, const RealMatrix& k);

// Per-shot values of sum_D v_D Re psi_D(k).
RealVector project_scalars(const ModeSpace& modes, const RealMatrix& k, const RealVector& v);

double csi_bound(double p_bra, double p_ket);

// Linear functional of (populations, g) followed by a Cauchy-Schwarz
// subtraction:
//   F~ = constant + sum_D a_D Re g_D + sum_i diag_i p_i - sum_pairs w sqrt(p_i p_j).
struct BoundPlan {
  struct Pair {
    std::uint32_t i;
    std::uint32_t j;
    double weight;
  };
  RealVector a;
  double constant = 0.0;
  RealVector diag;
  std::vector<Pair> pairs;
};

struct BoundTerms {
  double population = 0.0;  // sum_i diag_i p_i
  double coherence = 0.0;   // coherence_sum - csi
  double coherence_sum = 0.0;
  double csi = 0.0;
  double total() const { return population + coherence; }
};

BoundTerms evaluate(const BoundPlan& plan, const RealVector& populations, const ComplexVector& g);
double csi_total(const BoundPlan& plan, const RealVector& populations);

// Uniform references (attractive and repulsive MES, GHZ, nondimer states).
BoundPlan plan_uniform(const ModeSpace& modes, const ReferenceState& ref);
// Two-atom lambda family, three partial bounds with weights (nd-nd, d-d, d-nd).
BoundPlan plan_lambda(const ModeSpace& modes, const ReferenceState& ref);
BoundPlan make_plan(const ModeSpace& modes, const ReferenceState& ref);

// Two atoms, attractive MES: dimer populations plus dimer fringes minus the
// nondimer coherences sharing a diagonal shift.
double bound_attractive(const RealVector& populations, const ComplexVector& g,
                        const ModeSpace& modes);
double bound_multiparticle(const RealVector& populations, const ComplexVector& g,
                           const ModeSpace& modes, const ReferenceState& ref);
double bound_tripartite(const RealVector& populations, const ComplexVector& g,
                        const ModeSpace& modes);
double bound_repulsive(const RealVector& populations, const ComplexVector& g,
                       const ModeSpace& modes, const ReferenceState& ref);

// Bound with populations and coherences read directly off rho.
BoundTerms exact_bound(const DensityMatrix& rho, const ModeSpace& modes, const BoundPlan& plan);

}  // namespace dimcert
