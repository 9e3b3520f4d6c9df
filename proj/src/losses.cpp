#include "qnode/losses.hpp"

#include <stdexcept>

namespace qnode {

std::pair<double, AdjointSeed> stateprep_loss_and_seed(const DensityMatrix& rhoT,
                                                       const DensityMatrix& sigma) {
    if (rhoT.dim() != sigma.dim())
        throw std::invalid_argument("stateprep_loss_and_seed: dimension mismatch");
    const double loss = 1.0 - expectation(sigma.entries(), rhoT.entries());
    AdjointSeed seed;
    seed.components.push_back(SeedComponent::make_mixed(1.0, -1.0, sigma.entries()));
    return {loss, std::move(seed)};
}

std::pair<double, std::vector<AdjointSeed>> hamlearn_loss_and_seeds(
    const std::vector<DensityMatrix>& evolved, const std::vector<DensityMatrix>& targets) {
    if (evolved.empty() || evolved.size() != targets.size())
        throw std::invalid_argument("hamlearn_loss_and_seeds: batch size mismatch");
    const double w = 1.0 / double(evolved.size());
    double loss = 0.0;
    std::vector<AdjointSeed> seeds;
    for (std::size_t j = 0; j < evolved.size(); ++j) {
        loss += w * (1.0 - expectation(targets[j].entries(), evolved[j].entries()));
        AdjointSeed s;
        s.components.push_back(SeedComponent::make_mixed(w, -1.0, targets[j].entries()));
        seeds.push_back(std::move(s));
    }
    return {loss, std::move(seeds)};
}

std::pair<double, AdjointSeed> observable_loss_and_seed(
    const std::vector<ObservableRecord>& records, const DensityMatrix& rhoT, double weight) {
    if (records.empty()) throw std::invalid_argument("observable_loss_and_seed: no records");
    double loss = 0.0;
    AdjointSeed seed;
    for (const ObservableRecord& rec : records) {
        const Mat o = rec.observable.dense();
        if (o.rows() != rhoT.dim())
            throw std::invalid_argument("observable_loss_and_seed: dimension mismatch");
        const double pred = expectation(o, rhoT.entries());
        const double diff = pred - rec.value;
        loss += weight * diff * diff;
        const double prefactor = 2.0 * weight * diff;
        for (const auto& [coef, state] : pauli_decompose_to_pure(rec.observable))
            seed.components.push_back(
                SeedComponent::make_mixed(prefactor, coef, state.entries()));
    }
    return {loss, std::move(seed)};
}

std::pair<double, AdjointSeed> purity_loss_and_seed(const DensityMatrix& R_T, Index d_e) {
    const auto& dims = R_T.dims();
    // Peel trailing subsystems until their product is exactly d_e.
    Index env = 1;
    std::size_t cut = dims.size();
    while (cut > 0 && env < d_e) env *= dims[--cut];
    if (env != d_e || cut == 0)
        throw std::invalid_argument("purity_loss_and_seed: dims do not factor off d_e");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < cut; ++i) keep.push_back(i);

    const DensityMatrix rho_red = partial_trace(R_T, keep);
    const double loss = 1.0 - rho_red.purity();
    Mat a = kron(rho_red.entries(), Mat::Identity(d_e, d_e) / double(d_e));
    AdjointSeed seed;
    seed.components.push_back(SeedComponent::make_mixed(1.0, -2.0 * double(d_e), std::move(a)));
    return {loss, std::move(seed)};
}

} // namespace qnode
