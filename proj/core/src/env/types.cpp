#include "fedsel/env/types.hpp"

#include <stdexcept>

namespace fedsel::env {

std::vector<double> Observation::features() const {
  const int c = clients();
  const int m = global->services();
  std::vector<double> f;
  f.reserve(feature_size(c, m));
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < m; ++j) f.push_back(global->dqi(i, j));
  }
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < m; ++j) f.push_back(global->bids(i, j) / bid_scale);
  }
  f.push_back(budget / budget_scale);
  f.push_back(accuracy);
  f.push_back(static_cast<double>(slot) / static_cast<double>(horizon));
  return f;
}

HybridAction HybridAction::empty(int clients) {
  HybridAction a;
  a.selected.assign(static_cast<std::size_t>(clients), 0);
  a.payments.assign(static_cast<std::size_t>(clients), 0.0);
  return a;
}

int HybridAction::count() const {
  int n = 0;
  for (auto s : selected) n += s ? 1 : 0;
  return n;
}

void HybridAction::select(int client, double payment) {
  if (client < 0 || static_cast<std::size_t>(client) >= selected.size()) {
    throw std::out_of_range("HybridAction::select: client out of range");
  }
  selected[static_cast<std::size_t>(client)] = 1;
  payments[static_cast<std::size_t>(client)] = payment;
}

double action_spend(const HybridAction& action) {
  double total = 0.0;
  for (std::size_t c = 0; c < action.selected.size(); ++c) {
    if (action.selected[c]) total += action.payments[c];
  }
  return total;
}

}  // namespace fedsel::env
