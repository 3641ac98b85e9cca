#pragma once

#include <stdexcept>

namespace ggbm {

// A series or iterative evaluation could not reach its accuracy target.
class accuracy_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Circulant embedding produced inadmissible eigenvalues and the dense
// square-root fallback failed as well.
class embedding_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough usable samples / grid points for the requested estimate.
class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A series expansion was evaluated outside its validity regime.
class series_validity_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ggbm
