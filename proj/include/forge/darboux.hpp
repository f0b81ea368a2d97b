#pragma once

#include "forge/grid.hpp"
#include "forge/potential.hpp"
#include "forge/wavefunction.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace forge {

enum class ChainClass { completely_reducible, irreducible_singular };

std::string_view to_string(ChainClass c);

/// Potential samples that may carry poles. Pole samples hold 0 and are
/// flagged in `is_pole`; `poles` lists the singular x-locations.
struct PoledSamples {
  Samples values;
  std::vector<bool> is_pole;
  std::vector<double> poles;

  bool regular() const { return poles.empty(); }
};

/// V0 - 2 (log u)'' written as V0 - 2 (u''/u - (u'/u)^2) with stencil
/// derivatives. Samples within one cell of a zero of u are poles.
PoledSamples first_order_transform(const Grid& grid, const Samples& v0, const Samples& u);
PoledSamples first_order_transform(const Potential& v0, const WaveFunction& u);

/// Second-order transformation built from u1 (energy alpha1) and u2
/// (energy alpha2 > alpha1). Immutable after construction.
struct DarbouxPair {
  Potential v0;
  Grid grid;
  Samples v0_samples;
  WaveFunction u1;
  WaveFunction u2;
  double alpha1;
  double alpha2;
  WronskianTrace w;
  /// Intermediate potential of the factorized chain, singular at zeros of u1.
  PoledSamples v1;
  /// V0 - 2 (log W)''.
  PoledSamples v2;
  /// V2 as a tabulated potential; present iff the pair is regular.
  std::optional<Potential> v2_potential;
  ChainClass chain_class;
  /// Lf = f'' + p f' + q f with p = -W'/W and q = (u1' u2'' - u2' u1'')/W.
  Samples coeff_p;
  Samples coeff_q;

  bool regular() const { return v2.regular(); }
};

/// Throws std::invalid_argument when alpha2 <= alpha1, grids differ, or
/// W vanishes identically (u1 and u2 linearly dependent).
DarbouxPair second_order_transform(const Potential& v0, const WaveFunction& u1, const WaveFunction& u2);

/// L psi = W(u1,u2,psi)/W(u1,u2) for an eigen-solution psi of h0; psi'' is
/// replaced by (V0 - E) psi. Throws std::domain_error for non-regular pairs.
WaveFunction apply_L(const DarbouxPair& pair, const WaveFunction& psi);

/// L f for an arbitrary sampled f, with f'' from the 5-point stencil.
Samples apply_L(const DarbouxPair& pair, const Samples& f);

/// Formal adjoint L+ g = g'' - (p g)' + q g, using (log W)'' = (V0 - V2)/2
/// for p'. The Samples overload takes g'' from the stencil; the
/// WaveFunction overload treats g as an eigen-solution of h2 at g.energy().
Samples apply_L_adjoint(const DarbouxPair& pair, const Samples& g);
Samples apply_L_adjoint(const DarbouxPair& pair, const WaveFunction& g);

/// max |L u_j| relative to the largest term entering L u_j, for j = 1, 2.
double annihilation_residual(const DarbouxPair& pair, int j);

struct KernelFunctions {
  WaveFunction v1;  // u2 / W, energy alpha1
  WaveFunction v2;  // u1 / W, energy alpha2
  bool v1_square_integrable;
  bool v2_square_integrable;
};

/// Basis of Ker L+. Throws std::domain_error for non-regular pairs.
KernelFunctions kernel_functions(const DarbouxPair& pair);

/// V2 rebuilt through the two first-order steps without using W: V1 from
/// u1, then the transform of V1 by v = u2' - (u1'/u1) u2. Samples near zeros
/// of u1 or v are poles.
PoledSamples factorized_v2(const DarbouxPair& pair);

/// Writes `x,V` (or `x,V,is_pole` when poles are present) for the samples.
void write_potential_csv(const std::filesystem::path& path, const Grid& grid, const PoledSamples& v);

}  // namespace forge
