#include "fedsel/market/client.hpp"

#include <stdexcept>

namespace fedsel::market {

void ServiceSpec::validate() const {
  if (!(budget_per_slot > 0.0)) throw std::invalid_argument("service budget must be > 0");
  if (!(target_accuracy > 0.0 && target_accuracy <= 1.0)) {
    throw std::invalid_argument("service target accuracy must be in (0, 1]");
  }
  if (!(reward_base > 1.0)) throw std::invalid_argument("service reward base must be > 1");
  if (dqi_params.eta6 == 0.0) throw std::invalid_argument("service eta6 must be non-zero");
}

void Grids::validate() const {
  if (sizes.empty() || emds.empty()) throw std::invalid_argument("grids must be non-empty");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("grid sizes must be positive");
  }
  for (double v : emds) {
    if (!(v >= 0.0 && v <= 2.0)) throw std::invalid_argument("grid emd values must be in [0, 2]");
  }
}

DatasetProfile make_profile(int size, double target_emd, const ServiceSpec& service,
                            std::mt19937_64& rng) {
  DatasetProfile profile;
  profile.size = size;
  profile.target_emd = target_emd;
  profile.distribution = synth_distribution(target_emd, service.reference, rng);
  profile.emd = emd(profile.distribution, service.reference);
  profile.dqi = dqi(size, profile.emd, service.dqi_params);
  return profile;
}

ClientState refresh_client(const ClientState& client, const std::vector<ServiceSpec>& services,
                           const Grids& grids, const PricingRule& pricing, std::mt19937_64& rng) {
  ClientState next;
  next.id = client.id;
  next.cores = client.cores;
  next.profiles.reserve(services.size());
  next.cost_bids.reserve(services.size());
  std::uniform_int_distribution<std::size_t> pick_size(0, grids.sizes.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_emd(0, grids.emds.size() - 1);
  for (const auto& service : services) {
    const int size = grids.sizes[pick_size(rng)];
    const double target = grids.emds[pick_emd(rng)];
    next.profiles.push_back(make_profile(size, target, service, rng));
    next.cost_bids.push_back(pricing(size, target));
  }
  return next;
}

}  // namespace fedsel::market
