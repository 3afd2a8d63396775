#pragma once

#include <string_view>
#include <vector>

namespace isrs_egn {

enum class NliClass { sci, xci, mci };

std::string_view to_string(NliClass c);

/// One (kappa1, kappa2, l) region of the integration domain for a given COI.
struct Island {
  int kappa1 = 0;
  int kappa2 = 0;
  int l = 0;
  NliClass nli_class = NliClass::sci;

  int kappa3(int kappa) const { return kappa1 + kappa2 - kappa + l; }

  bool operator==(const Island&) const = default;
};

/// All islands for COI kappa on a 2M+1 grid, ordered lexicographically by (kappa1, kappa2, l).
std::vector<Island> enumerate_islands(int m, int kappa);

NliClass classify_island(const Island& island, int kappa);

}  // namespace isrs_egn
