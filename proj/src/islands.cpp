#include "isrs_egn/islands.hpp"

#include <cstdlib>
#include <set>
#include <stdexcept>

namespace isrs_egn {

std::string_view to_string(NliClass c) {
  switch (c) {
    case NliClass::sci:
      return "SCI";
    case NliClass::xci:
      return "XCI";
    case NliClass::mci:
      return "MCI";
  }
  return "?";
}

std::vector<Island> enumerate_islands(int m, int kappa) {
  if (m < 0 || std::abs(kappa) > m) throw std::invalid_argument("COI index outside the channel grid");
  std::vector<Island> out;
  for (int k1 = -m; k1 <= m; ++k1) {
    for (int k2 = -m; k2 <= m; ++k2) {
      for (int l = -1; l <= 1; ++l) {
        const int k3 = k1 + k2 - kappa + l;
        if (k3 < -m || k3 > m) continue;
        Island i{k1, k2, l, NliClass::sci};
        i.nli_class = classify_island(i, kappa);
        out.push_back(i);
      }
    }
  }
  return out;
}

NliClass classify_island(const Island& island, int kappa) {
  std::set<int> others;
  for (int k : {island.kappa1, island.kappa2, island.kappa3(kappa)}) {
    if (k != kappa) others.insert(k);
  }
  if (others.empty()) return NliClass::sci;
  if (others.size() == 1) return NliClass::xci;
  return NliClass::mci;
}

}  // namespace isrs_egn
