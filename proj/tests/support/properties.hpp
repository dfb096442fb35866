#pragma once

// Model-independent property checks. Each runs on small generic couplings
// drawn from a fixed-seed generator and reports what it saw.

#include <functional>
#include <string>
#include <vector>

namespace properties {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Property {
  std::string name;
  std::function<Outcome()> check;
};

Outcome basis_bijection();
Outcome hop_sign_scan();
Outcome eigen_residuals();
Outcome trace_check();
Outcome conjugate_closure();
Outcome entropy_subset_symmetry();
Outcome clustering_partition();

const std::vector<Property>& all();

}  // namespace properties
