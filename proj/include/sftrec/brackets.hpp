#pragma once

#include <sftrec/series.hpp>

namespace sftrec {

// {f,g} = Σ_γ κ_γ ( (f ∂←/∂p_γ)(∂→/∂q_γ g) − (−1)^{|f||g|} (g ∂←/∂p_γ)(∂→/∂q_γ f) ),
// applied to the parity-homogeneous parts of f and g.
GradedSeries poisson_bracket(const GradedSeries& f, const GradedSeries& g);

// Star product on normally ordered series (all q-factors to the left of all p-factors),
// with p_γ ⋆ q_γ = (−1)^{|p||q|} q_γ p_γ + κ_γ ħ.
GradedSeries star_product(const GradedSeries& f, const GradedSeries& g);

// f⋆g − (−1)^{|f||g|} g⋆f on parity-homogeneous parts. Requires an ħ variable and max_hbar_order ≥ 1.
GradedSeries weyl_commutator(const GradedSeries& f, const GradedSeries& g);

} // namespace sftrec
