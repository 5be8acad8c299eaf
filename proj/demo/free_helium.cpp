// Free and confined helium with the simplest correlated trial function:
// optimize, reduce to the one-electron density, print its information measures.

#include <cstdio>

#include "cae/infotheory.hpp"

int main() {
  using namespace cae;
  for (const auto r0 : {CavityRadius(1.0), CavityRadius(4.0), CavityRadius::free_space()}) {
    const auto state = solve_ground_state(TrialKind::Psi1, r0);
    const auto rho = tabulate_density(state);
    const auto info = entropy_report(rho);
    std::printf("r0=%-4g E=%.6f alpha=%.4f beta=%.4f  S=%.5f F=%.4f C_FS=%.4f\n", r0.value(),
                state.energy, state.params[0], state.params[1], info.shannon, info.fisher,
                info.fisher_shannon);
  }
}
