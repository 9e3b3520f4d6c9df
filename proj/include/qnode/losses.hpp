#pragma once

#include "qnode/adjoint.hpp"

namespace qnode {

// State preparation: L = 1 - tr(sigma rhoT); seed is (c=1, A_T=-1, a_T=sigma).
std::pair<double, AdjointSeed> stateprep_loss_and_seed(const DensityMatrix& rhoT,
                                                       const DensityMatrix& sigma);

// Hamiltonian learning: L = (1/M_s) sum_j (1 - tr(sigma_j rho_j)); each sample
// contributes a state-prep seed scaled by 1/M_s (its c coefficient).
std::pair<double, std::vector<AdjointSeed>> hamlearn_loss_and_seeds(
    const std::vector<DensityMatrix>& evolved, const std::vector<DensityMatrix>& targets);

struct ObservableRecord {
    PauliString observable;
    double value = 0.0;  // tr(O sigma(T)) supplied by the data source
    std::size_t state_id = 0;
    double T = 0.0;
};

// Tomography matching on one trajectory: L = weight * sum_r |value_r - tr(O_r rhoT)|^2.
// deltaL/deltaRho = 2 weight (tr(O rhoT) - value) O per record, with O split
// into signed pure projectors; the projector sign rides on A_T, the
// data-model mismatch on c.
std::pair<double, AdjointSeed> observable_loss_and_seed(
    const std::vector<ObservableRecord>& records, const DensityMatrix& rhoT, double weight);

// Purity of the reduced state: L = 1 - tr(tr_e(R_T)^2) with the trailing
// subsystems of total dimension d_e traced out. Seed lives on the full space:
// a_T = rho_red (x) 1/d_e, A_T = -2 d_e.
std::pair<double, AdjointSeed> purity_loss_and_seed(const DensityMatrix& R_T, Index d_e);

} // namespace qnode
